#include "refugia/diagnostics.hpp"

#include "refugia/errors.hpp"
#include "refugia/method_of_steps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace refugia {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "'" << name << "' must be positive, got " << v;
        throw ConfigError(os.str());
    }
}

std::size_t steps_for(double span, double step)
{
    return static_cast<std::size_t>(std::llround(span / step));
}

struct TangentOutcome {
    std::vector<double> exponents;
    int segment_dim = 0;
};

/// Integrates the model together with n_exp tangent perturbations and
/// accumulates log stretching factors of the history-segment basis.
template <class Observer>
TangentOutcome run_tangent(const ModelParams& p, State phi, int n_exp, double step, double ortho_interval,
                           double accumulate_from, double total, Observer&& observe)
{
    p.validate();
    check_step(p, step);
    require_positive(ortho_interval, "ortho_interval");
    require_positive(total, "horizon");
    if (!(phi.x > 0.0) || !(phi.y > 0.0))
        throw ConfigError("initial history must be componentwise positive");

    const auto K = static_cast<std::size_t>(std::ceil(p.max_delay() / step - 1e-9));
    const std::size_t seg_nodes = K + 1;
    const int seg_dim = static_cast<int>(2 * seg_nodes);
    if (n_exp < 1 || n_exp > seg_dim) {
        std::ostringstream os;
        os << "number of exponents must be in [1, " << seg_dim << "], got " << n_exp;
        throw ConfigError(os.str());
    }
    const auto n = static_cast<std::size_t>(n_exp);
    const std::size_t dim = 2 + 2 * n;

    auto field = [&p, n](double, std::span<const double> u, const LagView& lag, std::span<double> out) {
        const double x = u[0];
        const double y = u[1];
        const double xl1 = lag(0, p.tau1);
        const double xl2 = lag(0, p.tau2);
        const double g = response(p, x);
        const double g2 = response(p, xl2);
        out[0] = p.r * x * (1.0 - xl1 / p.k) - g * y;
        out[1] = y * (p.theta * g2 - p.d);
        const double a_xx = p.r * (1.0 - xl1 / p.k) - response_slope(p, x) * y;
        const double a_x1 = -p.r * x / p.k;
        const double a_yy = p.theta * g2 - p.d;
        const double a_y2 = p.theta * response_slope(p, xl2) * y;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t cx = 2 + 2 * j;
            out[cx] = a_xx * u[cx] + a_x1 * lag(cx, p.tau1) - g * u[cx + 1];
            out[cx + 1] = a_yy * u[cx + 1] + a_y2 * lag(cx, p.tau2);
        }
    };

    std::vector<double> initial(dim, 0.0);
    initial[0] = phi.x;
    initial[1] = phi.y;
    MethodOfSteps engine(dim, step, initial, field, history_capacity(p, step) + 1);
    auto& hist = engine.history();

    const std::size_t per_ortho = std::max<std::size_t>(1, steps_for(ortho_interval, step));
    const std::size_t total_steps = steps_for(total, step);
    const std::size_t seed_step = K;

    std::vector<double> log_sums(n, 0.0);
    double accumulated = 0.0;
    Eigen::MatrixXd S(seg_dim, n_exp);

    auto orthonormalize = [&](bool accumulate) {
        const std::size_t front = hist.front_node();
        for (std::size_t i = 0; i < seg_nodes; ++i) {
            auto v = hist.value(front - K + i);
            for (std::size_t j = 0; j < n; ++j) {
                S(2 * i, j) = v[2 + 2 * j];
                S(2 * i + 1, j) = v[3 + 2 * j];
            }
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(S);
        const Eigen::MatrixXd R = qr.matrixQR().topRows(n_exp).triangularView<Eigen::Upper>();
        for (int j = 0; j < n_exp; ++j) {
            const double rjj = std::abs(R(j, j));
            if (!(rjj > 0.0) || !std::isfinite(rjj))
                throw NonFiniteStateError("tangent basis collapsed or overflowed");
            if (accumulate)
                log_sums[j] += std::log(rjj);
        }
        const Eigen::MatrixXd T =
            R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n_exp, n_exp));
        std::vector<double> buf(n);
        auto remix = [&](std::span<double> u) {
            for (int c = 0; c < 2; ++c) {
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i <= j; ++i)
                        acc += u[2 + 2 * i + c] * T(i, j);
                    buf[j] = acc;
                }
                for (std::size_t j = 0; j < n; ++j)
                    u[2 + 2 * j + c] = buf[j];
            }
        };
        for (std::size_t node = hist.oldest_node(); node <= front; ++node) {
            remix(hist.value(node));
            remix(hist.derivative(node));
        }
        engine.invalidate_front();
    };

    auto seed = [&]() {
        const std::size_t front = hist.front_node();
        const double span = std::max(static_cast<double>(K), 1.0) * step;
        for (std::size_t node = hist.oldest_node(); node <= front; ++node) {
            const double s = hist.node_time(node) - hist.node_time(front);
            auto v = hist.value(node);
            auto d = hist.derivative(node);
            for (std::size_t j = 0; j < n; ++j) {
                const double q = static_cast<double>(j / 2) * std::numbers::pi / span;
                const std::size_t on = 2 + 2 * j + (j % 2);
                const std::size_t off = 2 + 2 * j + 1 - (j % 2);
                v[on] = std::cos(q * s);
                d[on] = -q * std::sin(q * s);
                v[off] = 0.0;
                d[off] = 0.0;
            }
        }
        engine.invalidate_front();
        orthonormalize(false);
    };

    auto check_front = [&]() {
        auto u = hist.value(hist.front_node());
        for (double v : u)
            if (!std::isfinite(v))
                throw NonFiniteStateError("non-finite state at t = " + std::to_string(engine.time()));
        if (u[0] < 0.0 || u[1] < 0.0) {
            std::ostringstream os;
            os << "negative state at t = " << engine.time();
            throw NegativeStateError(os.str());
        }
    };

    observe(0.0, phi);
    if (seed_step == 0)
        seed();
    std::size_t since = 0;
    for (std::size_t i = 1; i <= total_steps; ++i) {
        engine.advance();
        check_front();
        const auto u = engine.state();
        observe(engine.time(), State{u[0], u[1]});
        if (i == seed_step) {
            seed();
            since = 0;
        } else if (i > seed_step && ++since == per_ortho) {
            since = 0;
            const double t = engine.time();
            const double span = static_cast<double>(per_ortho) * step;
            const bool acc = t - span >= accumulate_from - 1e-9;
            orthonormalize(acc);
            if (acc)
                accumulated += span;
        }
    }

    TangentOutcome out;
    out.segment_dim = seg_dim;
    for (double s : log_sums)
        out.exponents.push_back(accumulated > 0.0 ? s / accumulated : std::numeric_limits<double>::quiet_NaN());
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    return out;
}

} // namespace

void DiagnosticSettings::validate() const
{
    if (!(transient >= 0.0) || !std::isfinite(transient))
        throw ConfigError("'transient' must be non-negative");
    if (!(record > 100.0) || !std::isfinite(record))
        throw ConfigError("'record' must exceed 100 time units");
    require_positive(step, "step");
    require_positive(rel_tol, "rel_tol");
    require_positive(eps_fp, "eps_fp");
    if (!(lle_threshold >= 0.0))
        throw ConfigError("'lle_threshold' must be non-negative");
    if (cluster_cap < 1)
        throw ConfigError("'cluster_cap' must be >= 1");
    require_positive(ortho_interval, "ortho_interval");
}

int count_clusters(std::vector<double> values, double rel_tol)
{
    if (values.empty())
        return 0;
    std::sort(values.begin(), values.end());
    int clusters = 1;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double scale = std::max(std::abs(values[i]), std::abs(values[i - 1]));
        if (values[i] - values[i - 1] > rel_tol * scale)
            ++clusters;
    }
    return clusters;
}

PeakAnalysis peak_analysis(std::span<const double> times, std::span<const double> y, double transient,
                           double rel_tol)
{
    if (times.size() != y.size() || times.size() < 3)
        throw ConfigError("peak_analysis: need at least three aligned samples");
    if (!(times.back() > transient + 100.0))
        throw ConfigError("peak_analysis: horizon must exceed transient + 100");
    require_positive(rel_tol, "rel_tol");

    PeakAnalysis out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (times[i] < transient)
            continue;
        if (!(y[i - 1] < y[i] && y[i] >= y[i + 1]))
            continue;
        const double curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
        double offset = 0.0;
        double height = y[i];
        if (curvature < 0.0) {
            offset = 0.5 * (y[i - 1] - y[i + 1]) / curvature;
            height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * offset;
        }
        out.peak_times.push_back(times[i] + offset * (times[i + 1] - times[i]));
        out.peak_values.push_back(height);
    }
    if (out.peak_values.size() < 8) {
        out.too_few_peaks = true;
        out.clusters = 0;
        return out;
    }
    out.clusters = count_clusters(out.peak_values, rel_tol);
    return out;
}

PeakAnalysis peak_analysis(const Trajectory& traj, double transient, double rel_tol)
{
    std::vector<double> y(traj.size());
    std::transform(traj.states.begin(), traj.states.end(), y.begin(), [](State s) { return s.y; });
    return peak_analysis(traj.times, y, transient, rel_tol);
}

LyapunovSpectrum lyapunov_spectrum(const ModelParams& p, State phi, int n_exp, const LyapunovSettings& s)
{
    if (!(s.transient >= 0.0))
        throw ConfigError("'transient' must be non-negative");
    require_positive(s.window, "window");
    require_positive(s.step, "step");
    const auto run = run_tangent(p, phi, n_exp, s.step, s.ortho_interval, s.transient, s.transient + s.window,
                                 [](double, State) {});
    LyapunovSpectrum out;
    out.exponents = run.exponents;
    out.n_exponents = n_exp;
    out.ortho_interval = s.ortho_interval;
    out.state_dim_discretized = run.segment_dim;
    return out;
}

std::string AttractorVerdict::label() const
{
    switch (kind) {
    case AttractorKind::FixedPoint:
        return "FixedPoint";
    case AttractorKind::PeriodicN:
        return "PeriodicN(" + std::to_string(period) + ")";
    case AttractorKind::Chaotic:
        return "Chaotic";
    case AttractorKind::Undetermined:
        return "Undetermined";
    }
    return "Undetermined";
}

AttractorVerdict classify_attractor(const ModelParams& p, State phi, const DiagnosticSettings& s)
{
    s.validate();
    std::vector<double> times;
    std::vector<double> xs;
    std::vector<double> ys;
    const auto keep = static_cast<std::size_t>(s.record / s.step) + 2;
    times.reserve(keep);
    xs.reserve(keep);
    ys.reserve(keep);
    State last = phi;
    const auto run = run_tangent(p, phi, 1, s.step, s.ortho_interval, s.transient, s.transient + s.record,
                                 [&](double t, State u) {
                                     last = u;
                                     if (t >= s.transient) {
                                         times.push_back(t);
                                         xs.push_back(u.x);
                                         ys.push_back(u.y);
                                     }
                                 });

    AttractorVerdict v;
    v.final_state = last;
    v.lle = run.exponents.front();

    double xs_scale = 0.0;
    double ys_scale = 0.0;
    try {
        const Equilibrium e = interior_equilibrium(p);
        xs_scale = e.x_star;
        ys_scale = e.y_star;
    } catch (const InfeasibleError&) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs_scale += xs[i] / static_cast<double>(xs.size());
            ys_scale += ys[i] / static_cast<double>(ys.size());
        }
    }
    const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    auto rel = [](double span, double scale) { return scale > 0.0 ? span / scale : span; };
    v.relative_amplitude = std::max(rel(*xhi - *xlo, xs_scale), rel(*yhi - *ylo, ys_scale));

    const PeakAnalysis peaks = peak_analysis(times, ys, s.transient, s.rel_tol);
    v.peak_values = peaks.peak_values;
    v.peak_clusters = peaks.clusters;

    std::ostringstream why;
    if (v.relative_amplitude < s.eps_fp) {
        v.kind = AttractorKind::FixedPoint;
        why << "relative amplitude " << v.relative_amplitude << " below " << s.eps_fp;
    } else if (v.lle < -s.lle_threshold) {
        v.kind = AttractorKind::FixedPoint;
        why << "oscillation decaying, largest exponent " << v.lle;
    } else if (peaks.too_few_peaks) {
        v.kind = v.lle <= s.lle_threshold ? AttractorKind::FixedPoint : AttractorKind::Undetermined;
        why << "too few peaks (" << peaks.peak_values.size() << ")";
    } else if (peaks.clusters <= s.cluster_cap && v.lle <= s.lle_threshold) {
        v.kind = AttractorKind::PeriodicN;
        v.period = peaks.clusters;
        why << peaks.clusters << " peak cluster(s)";
    } else if (v.lle > s.lle_threshold) {
        v.kind = AttractorKind::Chaotic;
        why << "largest exponent " << v.lle << " above " << s.lle_threshold;
    } else {
        v.kind = AttractorKind::Undetermined;
        why << peaks.clusters << " clusters with non-positive exponent";
    }
    v.details = why.str();
    return v;
}

} // namespace refugia
