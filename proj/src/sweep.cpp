#include "refugia/sweep.hpp"

#include "refugia/errors.hpp"
#include "refugia/linear_stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

namespace refugia {

namespace {

void set_axis(ModelParams& p, ScanAxisName name, double v)
{
    switch (name) {
    case ScanAxisName::Tau1:
        p.tau1 = v;
        break;
    case ScanAxisName::Tau2:
        p.tau2 = v;
        break;
    case ScanAxisName::Refuge:
        p.m = v;
        break;
    }
}

/// Runs job(i) for i in [0, count) over a pool; results are written by index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job)
{
    const auto workers = static_cast<std::size_t>(std::clamp<long>(worker_count(threads), 1, std::max<long>(1, count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++)
                job(i);
        });
    }
}

/// Shrinks the step for points whose positive delays are below four steps.
DiagnosticSettings settings_for(const ModelParams& p, DiagnosticSettings s)
{
    double tau_min = INFINITY;
    for (double tau : {p.tau1, p.tau2})
        if (tau > 0.0)
            tau_min = std::min(tau_min, tau);
    if (std::isfinite(tau_min) && s.step > tau_min / 4.0 && tau_min / 4.0 >= s.step / 16.0)
        s.step = tau_min / 4.0;
    return s;
}

ScanRow evaluate(const ModelParams& p, State phi, const DiagnosticSettings& s)
{
    ScanRow row;
    try {
        row.verdict = classify_attractor(p, phi, settings_for(p, s));
    } catch (const Error& e) {
        row.error = e.what();
        row.verdict.kind = AttractorKind::Undetermined;
        row.verdict.lle = NAN;
        row.verdict.final_state = phi;
        row.verdict.details = e.what();
    }
    return row;
}

/// Evaluates lines of points; points inside a line share warm starts when enabled.
ScanResult run_grid(const ScanGrid& grid, const SweepOptions& opt,
                    const std::function<std::optional<std::string>(const ModelParams&)>& precheck = {})
{
    grid.axis1.validate();
    if (grid.axis2)
        grid.axis2->validate();
    grid.settings.validate();

    const int n1 = grid.axis1.n;
    const int n2 = grid.axis2 ? grid.axis2->n : 1;
    ScanResult out;
    out.rows.resize(static_cast<std::size_t>(n1) * n2);

    auto point = [&](int i, int j, State phi) -> const ScanRow& {
        ModelParams p = grid.fixed;
        set_axis(p, grid.axis1.name, grid.axis1.value(i));
        if (grid.axis2)
            set_axis(p, grid.axis2->name, grid.axis2->value(j));
        ScanRow& row = out.rows[static_cast<std::size_t>(i) * n2 + j];
        std::optional<std::string> refused = precheck ? precheck(p) : std::nullopt;
        if (refused) {
            row.error = *refused;
            row.verdict.kind = AttractorKind::Undetermined;
            row.verdict.lle = NAN;
            row.verdict.final_state = phi;
            row.verdict.details = *refused;
        } else {
            row = evaluate(p, phi, grid.settings);
        }
        row.axis1_value = grid.axis1.value(i);
        if (grid.axis2)
            row.axis2_value = grid.axis2->value(j);
        return row;
    };

    if (!grid.continuation) {
        parallel_for(out.rows.size(), opt.threads, [&](std::size_t k) {
            point(static_cast<int>(k / n2), static_cast<int>(k % n2), grid.phi);
        });
        return out;
    }
    // Lines are independent; within a line the scan is sequential.
    const bool along_axis2 = grid.axis2.has_value();
    const int lines = along_axis2 ? n1 : 1;
    parallel_for(static_cast<std::size_t>(lines), opt.threads, [&](std::size_t line) {
        State phi = grid.phi;
        const int len = along_axis2 ? n2 : n1;
        for (int q = 0; q < len; ++q) {
            const ScanRow& row = along_axis2 ? point(static_cast<int>(line), q, phi) : point(q, 0, phi);
            const State f = row.verdict.final_state;
            if (!row.error && f.x > 0.0 && f.y > 0.0)
                phi = f;
        }
    });
    return out;
}

Trend trend_of(const std::vector<RefugeRow>& rows, std::optional<double> RefugeRow::*field)
{
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.*field)
            v.push_back(*(r.*field));
    if (v.size() < 2)
        return Trend::Insufficient;
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        up = up && v[i] > v[i - 1];
        down = down && v[i] < v[i - 1];
    }
    return up ? Trend::Increasing : down ? Trend::Decreasing : Trend::NonMonotone;
}

} // namespace

std::string_view to_string(ScanAxisName a)
{
    switch (a) {
    case ScanAxisName::Tau1:
        return "tau1";
    case ScanAxisName::Tau2:
        return "tau2";
    case ScanAxisName::Refuge:
        return "m";
    }
    return "?";
}

ScanAxisName parse_axis_name(std::string_view s)
{
    if (s == "tau1")
        return ScanAxisName::Tau1;
    if (s == "tau2")
        return ScanAxisName::Tau2;
    if (s == "m")
        return ScanAxisName::Refuge;
    throw ConfigError("unknown axis '" + std::string(s) + "' (expected tau1, tau2 or m)");
}

std::string_view to_string(Trend t)
{
    switch (t) {
    case Trend::Increasing:
        return "increasing";
    case Trend::Decreasing:
        return "decreasing";
    case Trend::NonMonotone:
        return "non-monotone";
    case Trend::Insufficient:
        return "insufficient";
    }
    return "?";
}

void ScanAxis::validate() const
{
    std::ostringstream os;
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        os << "axis " << to_string(name) << ": need lo < hi, got [" << lo << ", " << hi << "]";
    else if (n < 2)
        os << "axis " << to_string(name) << ": need n >= 2, got " << n;
    else if (name != ScanAxisName::Refuge && lo < 0.0)
        os << "axis " << to_string(name) << ": delays must be non-negative";
    else if (name == ScanAxisName::Refuge && (lo < 0.0 || hi >= 1.0))
        os << "axis m: range must lie in [0, 1)";
    if (!os.str().empty())
        throw ConfigError(os.str());
}

int worker_count(int requested)
{
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1)
        n = 1;
    if (const char* env = std::getenv("REFUGIA_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1)
            n = std::min<long>(n, cap);
    }
    return n;
}

ScanResult bifurcation_scan(const ScanGrid& grid, const SweepOptions& opt)
{
    if (grid.axis2)
        throw ConfigError("bifurcation_scan takes a single axis");
    return run_grid(grid, opt);
}

std::vector<CriticalCurve> critical_curves(const ModelParams& p, double tau1_max, double tau2_max, int samples)
{
    std::vector<CriticalCurve> out;
    CharCoefficients c;
    try {
        c = char_coefficients(p, interior_equilibrium(p));
    } catch (const InfeasibleError&) {
        return out;
    }
    samples = std::max(samples, 2);

    const double tau20 = *case2_critical(c).tau_star;
    if (tau20 <= tau2_max)
        out.push_back({"case2", {{0.0, tau20}}});

    std::optional<double> tau10;
    try {
        tau10 = *case4_critical(c).tau_star;
        if (*tau10 <= tau1_max)
            out.push_back({"case4", {{*tau10, 0.0}}});
    } catch (const NoHopfError&) {
    }

    CriticalCurve three{"case3", {}};
    const double t2_end = std::min(tau20, tau2_max);
    for (int i = 0; i < samples; ++i) {
        const double t2 = t2_end * i / samples;
        try {
            const double t1 = *case3_critical(c, t2).tau_star;
            if (t1 <= tau1_max)
                three.points.emplace_back(t1, t2);
        } catch (const NoHopfError&) {
        }
    }
    if (!three.points.empty())
        out.push_back(std::move(three));

    if (tau10) {
        CriticalCurve five{"case5", {}};
        const double t1_end = std::min(*tau10, tau1_max);
        for (int i = 0; i < samples; ++i) {
            const double t1 = t1_end * i / samples;
            try {
                const double t2 = *case5_critical(c, t1).tau_star;
                if (t2 <= tau2_max)
                    five.points.emplace_back(t1, t2);
            } catch (const NoHopfError&) {
            }
        }
        if (!five.points.empty())
            out.push_back(std::move(five));
    }
    return out;
}

RegionResult region_scan(const ScanGrid& grid, const SweepOptions& opt)
{
    if (!grid.axis2 || grid.axis1.name != ScanAxisName::Tau1 || grid.axis2->name != ScanAxisName::Tau2)
        throw ConfigError("region_scan needs axis1 = tau1 and axis2 = tau2");
    RegionResult out;
    out.cells = run_grid(grid, opt);
    out.overlay = critical_curves(grid.fixed, grid.axis1.hi, grid.axis2->hi);
    return out;
}

RefugeSweepResult refuge_sweep(const ScanGrid& grid, const SweepOptions& opt, bool classify)
{
    if (grid.axis1.name != ScanAxisName::Refuge || grid.axis2)
        throw ConfigError("refuge_sweep needs a single axis m");
    grid.axis1.validate();

    RefugeSweepResult out;
    for (int i = 0; i < grid.axis1.n; ++i) {
        ModelParams p = grid.fixed;
        p.m = grid.axis1.value(i);
        RefugeRow row;
        row.m = p.m;
        try {
            const auto c = char_coefficients(p, interior_equilibrium(p));
            row.feasible = true;
            const auto two = case2_critical(c);
            row.omega0 = two.omega_star;
            row.tau2_0 = two.tau_star;
            try {
                const auto four = case4_critical(c);
                row.omega1 = four.omega_star;
                row.tau1_0 = four.tau_star;
            } catch (const NoHopfError& e) {
                row.note = e.what();
            }
        } catch (const InfeasibleError& e) {
            row.note = std::string("Infeasible: ") + e.what();
        }
        out.critical.push_back(row);
    }
    out.tau2_0_trend = trend_of(out.critical, &RefugeRow::tau2_0);
    out.tau1_0_trend = trend_of(out.critical, &RefugeRow::tau1_0);

    if (classify) {
        out.scan = run_grid(grid, opt, [](const ModelParams& p) -> std::optional<std::string> {
            try {
                interior_equilibrium(p);
            } catch (const InfeasibleError& e) {
                return std::string("Infeasible: ") + e.what();
            }
            return std::nullopt;
        });
    }
    return out;
}

} // namespace refugia
