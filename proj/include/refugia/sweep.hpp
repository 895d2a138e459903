#pragma once

#include "refugia/diagnostics.hpp"
#include "refugia/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refugia {

enum class ScanAxisName { Tau1, Tau2, Refuge };

std::string_view to_string(ScanAxisName a);

/// Parses "tau1", "tau2" or "m"; throws ConfigError otherwise.
ScanAxisName parse_axis_name(std::string_view s);

struct ScanAxis {
    ScanAxisName name = ScanAxisName::Tau2;
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    double value(int i) const { return lo + (hi - lo) * i / (n - 1); }
    double spacing() const { return (hi - lo) / (n - 1); }
    void validate() const;
};

struct ScanGrid {
    ScanAxis axis1;
    std::optional<ScanAxis> axis2;
    ModelParams fixed;
    State phi{30.0, 5.83};
    DiagnosticSettings settings;
    /// Warm-start each point from the previous point's final state along a line.
    bool continuation = false;
};

struct ScanRow {
    double axis1_value = 0.0;
    std::optional<double> axis2_value;
    AttractorVerdict verdict;
    std::optional<std::string> error; ///< per-point failure; verdict is then Undetermined
};

struct ScanResult {
    std::vector<ScanRow> rows; ///< row-major: axis1 outer, axis2 inner
};

struct SweepOptions {
    /// 0 = hardware concurrency capped by REFUGIA_THREADS.
    int threads = 0;
};

/// Worker count: requested (or hardware) capped by the REFUGIA_THREADS environment variable.
int worker_count(int requested);

ScanResult bifurcation_scan(const ScanGrid& grid, const SweepOptions& opt = {});

/// One analytic stability-switch curve in the (tau1, tau2) plane.
struct CriticalCurve {
    std::string label;
    std::vector<std::pair<double, double>> points; ///< (tau1, tau2)
};

struct RegionResult {
    ScanResult cells;
    std::vector<CriticalCurve> overlay;
};

/// Analytic boundary from the four delay cases, clipped to the box.
std::vector<CriticalCurve> critical_curves(const ModelParams& p, double tau1_max, double tau2_max, int samples = 60);

RegionResult region_scan(const ScanGrid& grid, const SweepOptions& opt = {});

struct RefugeRow {
    double m = 0.0;
    bool feasible = false;
    std::optional<double> omega0;    ///< tau1 = 0 crossing frequency
    std::optional<double> tau2_0;    ///< tau1 = 0 critical gestation delay
    std::optional<double> omega1;    ///< tau2 = 0 crossing frequency
    std::optional<double> tau1_0;    ///< tau2 = 0 critical feedback delay
    std::optional<std::string> note;
};

enum class Trend { Increasing, Decreasing, NonMonotone, Insufficient };

std::string_view to_string(Trend t);

struct RefugeSweepResult {
    ScanResult scan;               ///< verdict at the template delays for each m
    std::vector<RefugeRow> critical;
    Trend tau2_0_trend = Trend::Insufficient;
    Trend tau1_0_trend = Trend::Insufficient;
};

/// classify = false skips the simulations and fills only the critical-delay table.
RefugeSweepResult refuge_sweep(const ScanGrid& grid, const SweepOptions& opt = {}, bool classify = true);

} // namespace refugia
