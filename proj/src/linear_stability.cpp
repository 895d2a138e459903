#include "refugia/linear_stability.hpp"

#include "refugia/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace refugia {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

/// Angle of (cos, sin) placed in [0, 2 pi).
double joint_angle(double cos_v, double sin_v)
{
    double a = std::atan2(sin_v, cos_v);
    if (a < 0.0)
        a += two_pi;
    // A crossing exactly at angle 0 can come back as 2 pi - ulp.
    if (a > two_pi - 1e-13)
        a = 0.0;
    return a;
}

Transversality sign_of(double re, double scale)
{
    if (!std::isfinite(re) || std::abs(re) <= 1e-12 * std::max(1.0, scale))
        return Transversality::Undetermined;
    return re > 0 ? Transversality::Positive : Transversality::Negative;
}

/// Adds every branch of one frequency root to the result.
void append_branches(CriticalDelayResult& out, const CharCoefficients& c, double omega, double angle,
                     int n_max, bool degenerate)
{
    const double fixed = out.fixed_delay ? out.fixed_delay->value : 0.0;
    for (int n = 0; n <= n_max; ++n) {
        CriticalRoot root;
        root.omega = omega;
        root.branch_index = n;
        root.tau_critical = (angle + two_pi * n) / omega;
        root.degenerate = degenerate;
        const double t1 = out.free_axis == DelayAxis::Tau1 ? root.tau_critical : fixed;
        const double t2 = out.free_axis == DelayAxis::Tau2 ? root.tau_critical : fixed;
        root.velocity = root_velocity(c, t1, t2, cplx(0.0, omega), out.free_axis);
        root.transversality_sign = sign_of(root.velocity.real(), std::abs(root.velocity));
        out.roots.push_back(root);
        if (n == 0 && (!out.tau_star || root.tau_critical < *out.tau_star)) {
            out.tau_star = root.tau_critical;
            out.omega_star = omega;
        }
    }
    out.frequencies.push_back(omega);
}

struct ScanRoot {
    double omega;
    bool degenerate;
};

/// Positive zeros of f on (0, omega_max]: sign-change bracketing on a uniform
/// grid, bisection, and tangency detection at small local minima of |f|.
template <class F>
std::vector<ScanRoot> scan_zeros(F&& f, double omega_max, const FrequencyScanOptions& opt)
{
    const int n = std::max(16, opt.scan_intervals);
    const double dw = omega_max / n;
    std::vector<double> vals(n + 1);
    for (int j = 0; j <= n; ++j)
        vals[j] = f(j * dw);

    std::vector<ScanRoot> roots;
    for (int j = 0; j < n; ++j) {
        const double lo_v = vals[j];
        const double hi_v = vals[j + 1];
        if (j > 0 && lo_v == 0.0) {
            roots.push_back({j * dw, false});
            continue;
        }
        if ((lo_v < 0.0) != (hi_v < 0.0) && hi_v != 0.0) {
            double lo = j * dw;
            double hi = (j + 1) * dw;
            double flo = lo_v;
            while (hi - lo > opt.bisection_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi)
                    break;
                const double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back({0.5 * (lo + hi), false});
            continue;
        }
        // Tangency: interior grid minimum of |f| with no sign change on either side.
        if (j > 0 && std::abs(lo_v) < opt.tangency_tol && std::abs(lo_v) <= std::abs(vals[j - 1]) &&
            std::abs(lo_v) <= std::abs(hi_v) && (vals[j - 1] < 0.0) == (lo_v < 0.0)) {
            double a = (j - 1) * dw;
            double b = (j + 1) * dw;
            for (int it = 0; it < 200 && b - a > opt.bisection_tol; ++it) {
                const double m1 = a + (b - a) / 3.0;
                const double m2 = b - (b - a) / 3.0;
                if (std::abs(f(m1)) < std::abs(f(m2)))
                    b = m2;
                else
                    a = m1;
            }
            roots.push_back({0.5 * (a + b), true});
        }
    }
    return roots;
}

double resolve_omega_max(const CharCoefficients& c, const FrequencyScanOptions& opt)
{
    return opt.omega_max > 0.0 ? opt.omega_max : 10.0 * std::max(1.0, std::sqrt(std::abs(c.C)));
}

} // namespace

CharCoefficients char_coefficients(const ModelParams& p, const Equilibrium& eq)
{
    if (eq.kind != EquilibriumKind::Interior)
        throw std::invalid_argument("char_coefficients: requires the interior equilibrium, got " +
                                    std::string(to_string(eq.kind)));
    const double a = p.effective_attack();
    const double den = 1.0 + a * p.h * eq.x_star;
    const double xy = eq.x_star * eq.y_star;
    return {-a * a * p.h * xy / (den * den), p.r * eq.x_star / p.k, p.theta * a * a * xy / (den * den * den)};
}

cplx char_eval(const CharCoefficients& c, double tau1, double tau2, cplx lambda)
{
    return lambda * lambda + c.A * lambda + c.B * lambda * std::exp(-lambda * tau1) +
           c.C * std::exp(-lambda * tau2);
}

cplx char_dlambda(const CharCoefficients& c, double tau1, double tau2, cplx lambda)
{
    const cplx e1 = std::exp(-lambda * tau1);
    const cplx e2 = std::exp(-lambda * tau2);
    return 2.0 * lambda + c.A + c.B * e1 - c.B * lambda * tau1 * e1 - c.C * tau2 * e2;
}

std::string_view to_string(DelayAxis axis)
{
    return axis == DelayAxis::Tau1 ? "tau1" : "tau2";
}

std::string_view to_string(DelayCase c)
{
    switch (c) {
    case DelayCase::I:
        return "I";
    case DelayCase::II:
        return "II";
    case DelayCase::III:
        return "III";
    case DelayCase::IV:
        return "IV";
    case DelayCase::V:
        return "V";
    }
    return "?";
}

cplx root_velocity(const CharCoefficients& c, double tau1, double tau2, cplx lambda, DelayAxis axis)
{
    // dP/dtau1 = -B lambda^2 e^{-lambda tau1}; dP/dtau2 = -C lambda e^{-lambda tau2}.
    const cplx num = axis == DelayAxis::Tau1 ? c.B * lambda * lambda * std::exp(-lambda * tau1)
                                             : c.C * lambda * std::exp(-lambda * tau2);
    return num / char_dlambda(c, tau1, tau2, lambda);
}

CriticalDelayResult case2_critical(const CharCoefficients& c, int n_max)
{
    CriticalDelayResult out;
    out.case_id = DelayCase::II;
    out.fixed_delay = FixedDelay{DelayAxis::Tau1, 0.0};
    out.free_axis = DelayAxis::Tau2;
    if (c.C == 0.0)
        throw NoHopfError("case II: C = 0 admits no positive crossing frequency");

    // w^4 + S^2 w^2 - C^2 = 0, positive root in cancellation-free form.
    const double s = c.A + c.B;
    const double s2 = s * s;
    const double w2 = 2.0 * c.C * c.C / (s2 + std::sqrt(s2 * s2 + 4.0 * c.C * c.C));
    const double w = std::sqrt(w2);
    const double angle = joint_angle(w2 / c.C, s * w / c.C);
    append_branches(out, c, w, angle, n_max, false);
    out.closed_form_indicator = (2.0 * w2 + s2) / (c.C * c.C);
    return out;
}

double case3_frequency_function(const CharCoefficients& c, double tau2, double w)
{
    const double w2 = w * w;
    return w2 * w2 + (c.A * c.A - c.B * c.B) * w2 + c.C * c.C - 2.0 * c.C * w2 * std::cos(w * tau2) -
           2.0 * c.A * c.C * w * std::sin(w * tau2);
}

double case5_frequency_function(const CharCoefficients& c, double tau1, double w)
{
    const double w2 = w * w;
    return w2 * w2 + (c.A * c.A + c.B * c.B) * w2 - c.C * c.C - 2.0 * c.B * w2 * w * std::sin(w * tau1) +
           2.0 * c.A * c.B * w2 * std::cos(w * tau1);
}

CriticalDelayResult case3_critical(const CharCoefficients& c, double tau2_fixed, const FrequencyScanOptions& opt)
{
    CriticalDelayResult out;
    out.case_id = DelayCase::III;
    out.fixed_delay = FixedDelay{DelayAxis::Tau2, tau2_fixed};
    out.free_axis = DelayAxis::Tau1;

    const auto zeros = scan_zeros([&](double w) { return case3_frequency_function(c, tau2_fixed, w); },
                                  resolve_omega_max(c, opt), opt);
    for (const auto& z : zeros) {
        const double w = z.omega;
        if (w <= 0.0)
            continue;
        const double cos_v = (c.C * std::sin(w * tau2_fixed) - c.A * w) / (c.B * w);
        const double sin_v = (w * w - c.C * std::cos(w * tau2_fixed)) / (c.B * w);
        append_branches(out, c, w, joint_angle(cos_v, sin_v), opt.n_max, z.degenerate);
    }
    if (out.frequencies.empty()) {
        std::ostringstream os;
        os << "case III: no positive frequency root for tau2 = " << tau2_fixed;
        throw NoHopfError(os.str());
    }
    return out;
}

CriticalDelayResult case4_critical(const CharCoefficients& c, int n_max)
{
    CriticalDelayResult out;
    out.case_id = DelayCase::IV;
    out.fixed_delay = FixedDelay{DelayAxis::Tau2, 0.0};
    out.free_axis = DelayAxis::Tau1;
    if (c.B == 0.0)
        throw std::invalid_argument("case IV: requires B != 0");

    // u^2 + M u + C^2 = 0 with u = w^2.
    const double M = c.A * c.A - c.B * c.B - 2.0 * c.C;
    const double disc = M * M - 4.0 * c.C * c.C;
    if (disc < 0.0)
        throw NoHopfError("case IV: frequency biquadratic has complex roots");
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (M + (M >= 0 ? sq : -sq));
    std::vector<double> us;
    if (q != 0.0) {
        us.push_back(q);
        us.push_back(c.C * c.C / q);
    } else {
        us.push_back(0.0);
    }
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    for (double u : us) {
        if (!(u > 0.0))
            continue;
        const double w = std::sqrt(u);
        append_branches(out, c, w, joint_angle(-c.A / c.B, (u - c.C) / (c.B * w)), n_max, disc == 0.0);
    }
    if (out.frequencies.empty())
        throw NoHopfError("case IV: no positive root of the frequency biquadratic");
    const double ws = *out.omega_star;
    out.closed_form_indicator = (M + 2.0 * ws * ws) / (c.B * c.B * ws * ws);
    return out;
}

CriticalDelayResult case5_critical(const CharCoefficients& c, double tau1_fixed, const FrequencyScanOptions& opt)
{
    CriticalDelayResult out;
    out.case_id = DelayCase::V;
    out.fixed_delay = FixedDelay{DelayAxis::Tau1, tau1_fixed};
    out.free_axis = DelayAxis::Tau2;
    if (c.C == 0.0)
        throw std::invalid_argument("case V: requires C != 0");

    const auto zeros = scan_zeros([&](double w) { return case5_frequency_function(c, tau1_fixed, w); },
                                  resolve_omega_max(c, opt), opt);
    for (const auto& z : zeros) {
        const double w = z.omega;
        if (w <= 0.0)
            continue;
        const double cos_v = (w * w - c.B * w * std::sin(w * tau1_fixed)) / c.C;
        const double sin_v = (c.A * w + c.B * w * std::cos(w * tau1_fixed)) / c.C;
        append_branches(out, c, w, joint_angle(cos_v, sin_v), opt.n_max, z.degenerate);
    }
    if (out.frequencies.empty()) {
        std::ostringstream os;
        os << "case V: no positive frequency root for tau1 = " << tau1_fixed;
        throw NoHopfError(os.str());
    }
    return out;
}

cplx refine_root(const CharCoefficients& c, double tau1, double tau2, cplx seed, const NewtonOptions& opt)
{
    cplx lam = seed;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const cplx step = char_eval(c, tau1, tau2, lam) / char_dlambda(c, tau1, tau2, lam);
        lam -= step;
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()))
            break;
        if (std::abs(step) <= opt.tol * std::max(1.0, std::abs(lam)))
            return lam;
    }
    std::ostringstream os;
    os << "Newton failed to converge from seed " << seed << " at (tau1, tau2) = (" << tau1 << ", " << tau2 << ")";
    throw NewtonDivergenceError(os.str());
}

std::vector<ComplexRoot> root_track(const CharCoefficients& c, const DelayPath& path, cplx lambda_seed,
                                    const NewtonOptions& opt)
{
    if (path.steps < 1)
        throw std::invalid_argument("root_track: steps must be >= 1");
    std::vector<ComplexRoot> out;
    out.reserve(path.steps + 1);
    const double d1 = (path.tau1_end - path.tau1_begin) / path.steps;
    const double d2 = (path.tau2_end - path.tau2_begin) / path.steps;

    cplx lam = refine_root(c, path.tau1_begin, path.tau2_begin, lambda_seed, opt);
    out.push_back({path.tau1_begin, path.tau2_begin, lam});

    for (int i = 1; i <= path.steps; ++i) {
        const double t1_prev = path.tau1_begin + (i - 1) * d1;
        const double t2_prev = path.tau2_begin + (i - 1) * d2;
        // Substep until the corrector converges, so a coarse grid cannot jump roots.
        int sub = 1;
        for (;;) {
            try {
                cplx trial = lam;
                for (int s = 0; s < sub; ++s) {
                    const double t1 = t1_prev + d1 * s / sub;
                    const double t2 = t2_prev + d2 * s / sub;
                    const cplx pred = root_velocity(c, t1, t2, trial, DelayAxis::Tau1) * (d1 / sub) +
                                      root_velocity(c, t1, t2, trial, DelayAxis::Tau2) * (d2 / sub);
                    trial = refine_root(c, t1_prev + d1 * (s + 1) / sub, t2_prev + d2 * (s + 1) / sub,
                                        trial + pred, opt);
                }
                lam = trial;
                break;
            } catch (const NewtonDivergenceError&) {
                if (sub >= 1024)
                    throw;
                sub *= 2;
            }
        }
        out.push_back({path.tau1_begin + i * d1, path.tau2_begin + i * d2, lam});
    }
    return out;
}

cplx undelayed_root(const CharCoefficients& c)
{
    const double s = c.A + c.B;
    const double disc = s * s - 4.0 * c.C;
    if (disc < 0.0)
        return {-0.5 * s, 0.5 * std::sqrt(-disc)};
    return {0.5 * (-s + std::sqrt(disc)), 0.0};
}

cplx tracked_dominant_root(const CharCoefficients& c, double tau1, double tau2, int steps)
{
    const double s = c.A + c.B;
    const double disc = s * s - 4.0 * c.C;
    std::vector<cplx> seeds;
    if (disc < 0.0) {
        seeds.push_back(undelayed_root(c));
    } else {
        seeds.emplace_back(0.5 * (-s + std::sqrt(disc)), 0.0);
        seeds.emplace_back(0.5 * (-s - std::sqrt(disc)), 0.0);
    }
    cplx best{};
    bool have = false;
    for (cplx seed : seeds) {
        const auto path = root_track(c, {0.0, tau1, 0.0, tau2, steps}, seed);
        const cplx end = path.back().lambda;
        if (!have || end.real() > best.real()) {
            best = end;
            have = true;
        }
    }
    return best;
}

} // namespace refugia
