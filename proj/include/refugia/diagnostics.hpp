#pragma once

#include "refugia/dde_solver.hpp"
#include "refugia/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace refugia {

struct DiagnosticSettings {
    double transient = 500.0;
    double record = 1000.0;
    double step = 0.005;
    double rel_tol = 1e-3;      ///< peak clustering tolerance, relative
    double eps_fp = 1e-4;       ///< fixed-point amplitude threshold, relative
    double lle_threshold = 0.005;
    int cluster_cap = 16;
    double ortho_interval = 1.0;

    void validate() const;

    bool operator==(const DiagnosticSettings&) const = default;
};

struct PeakAnalysis {
    std::vector<double> peak_times;
    std::vector<double> peak_values;
    int clusters = 0;
    /// Fewer than eight maxima after the transient: a fixed-point candidate.
    bool too_few_peaks = false;
};

/// Local maxima of y after the transient, refined by a parabola through the
/// three samples, clustered by single linkage on sorted heights.
PeakAnalysis peak_analysis(std::span<const double> times, std::span<const double> y, double transient,
                           double rel_tol);
PeakAnalysis peak_analysis(const Trajectory& traj, double transient, double rel_tol);

/// Number of groups of sorted values separated by gaps above rel_tol * |value|.
int count_clusters(std::vector<double> values, double rel_tol);

struct LyapunovSettings {
    double transient = 500.0;
    double window = 2000.0;
    double step = 0.005;
    double ortho_interval = 1.0;
};

struct LyapunovSpectrum {
    std::vector<double> exponents; ///< descending
    int n_exponents = 0;
    double ortho_interval = 0.0;
    int state_dim_discretized = 0;
};

/// Tangent dynamics on the discretized history segment, re-orthonormalized by
/// QR every ortho_interval, averaged over the window after the transient.
LyapunovSpectrum lyapunov_spectrum(const ModelParams& p, State phi, int n_exp, const LyapunovSettings& s = {});

enum class AttractorKind { FixedPoint, PeriodicN, Chaotic, Undetermined };

struct AttractorVerdict {
    AttractorKind kind = AttractorKind::Undetermined;
    int period = 0; ///< n for PeriodicN
    std::vector<double> peak_values;
    int peak_clusters = 0;
    double lle = 0.0;
    double relative_amplitude = 0.0;
    State final_state;
    std::string details;

    /// "FixedPoint", "PeriodicN(3)", "Chaotic", "Undetermined".
    std::string label() const;
};

/// Runs transient + record with one tangent vector alongside, so the largest
/// exponent comes from the same record window as the peaks.
AttractorVerdict classify_attractor(const ModelParams& p, State phi, const DiagnosticSettings& s = {});

} // namespace refugia
