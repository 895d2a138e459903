#include "refugia/hopf.hpp"

#include "refugia/errors.hpp"

#include <cmath>
#include <sstream>

namespace refugia {

namespace {

constexpr double degeneracy_tol = 1e-12;
const cplx I{0.0, 1.0};

cplx expi(double phase)
{
    return std::polar(1.0, phase);
}

struct Linearization {
    double a11; ///< d(dx/dt)/dx at E*, equals -A
    double a12; ///< g(x*), so d(dx/dt)/dy = -a12
    double b31; ///< theta g'(x*) y*
    double Bc;  ///< r x* / k
};

Linearization linearization(const ModelParams& p, const Equilibrium& eq)
{
    const double a = p.effective_attack();
    const double den = 1.0 + a * p.h * eq.x_star;
    return {a * a * p.h * eq.x_star * eq.y_star / (den * den), a * eq.x_star / den,
            p.theta * a * eq.y_star / (den * den), p.r * eq.x_star / p.k};
}

hopf_detail::Samples mode_samples(cplx q1, double omega, double tau1, double tau2)
{
    return {1.0, q1, expi(-omega * tau1), expi(-omega * tau2)};
}

hopf_detail::Samples conj_samples(const hopf_detail::Samples& s)
{
    return {std::conj(s[0]), std::conj(s[1]), std::conj(s[2]), std::conj(s[3])};
}

hopf_detail::Samples field_samples(const CVec2& at0, const CVec2& at_tau1, const CVec2& at_tau2)
{
    return {at0[0], at0[1], at_tau1[0], at_tau2[0]};
}

/// Cramer solve of M v = rhs.
CVec2 solve2(const std::array<CVec2, 2>& M, const CVec2& rhs, const char* what)
{
    const cplx det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (std::abs(det) < degeneracy_tol) {
        std::ostringstream os;
        os << what << ": singular 2x2 system, |det| = " << std::abs(det);
        throw SingularSystemError(os.str());
    }
    return {(rhs[0] * M[1][1] - M[0][1] * rhs[1]) / det, (M[0][0] * rhs[1] - rhs[0] * M[1][0]) / det};
}

} // namespace

namespace hopf_detail {

CVec2 bilinear(const ModelParams& p, const Equilibrium& eq, const Samples& u, const Samples& v)
{
    const double a = p.effective_attack();
    const double den = 1.0 + a * p.h * eq.x_star;
    const double g1 = a / (den * den);
    const double g2 = -2.0 * a * a * p.h / (den * den * den);
    const double ys = eq.y_star;
    const cplx f1 = -(p.r / p.k) * (u[0] * v[2] + u[2] * v[0]) - g1 * (u[0] * v[1] + u[1] * v[0]) -
                    g2 * ys * u[0] * v[0];
    const cplx f2 = p.theta * g1 * (u[3] * v[1] + u[1] * v[3]) + p.theta * g2 * ys * u[3] * v[3];
    return {f1, f2};
}

CVec2 trilinear(const ModelParams& p, const Equilibrium& eq, const Samples& u, const Samples& v, const Samples& w)
{
    const double a = p.effective_attack();
    const double den = 1.0 + a * p.h * eq.x_star;
    const double g2 = -2.0 * a * a * p.h / (den * den * den);
    const double g3 = 6.0 * a * a * a * p.h * p.h / (den * den * den * den);
    const double ys = eq.y_star;
    const cplx f1 = -g2 * (u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0]) -
                    g3 * ys * u[0] * v[0] * w[0];
    const cplx f2 = p.theta * g2 * (u[3] * v[3] * w[1] + u[3] * v[1] * w[3] + u[1] * v[3] * w[3]) +
                    p.theta * g3 * ys * u[3] * v[3] * w[3];
    return {f1, f2};
}

std::array<CVec2, 2> char_matrix(const ModelParams& p, const Equilibrium& eq, double tau1, double tau2,
                                 cplx lambda)
{
    const Linearization L = linearization(p, eq);
    return {CVec2{lambda - L.a11 + L.Bc * std::exp(-lambda * tau1), L.a12},
            CVec2{-L.b31 * std::exp(-lambda * tau2), lambda}};
}

cplx project(double tau1, cplx D, cplx qstar_conj, const CVec2& v)
{
    return tau1 * D * (v[0] + qstar_conj * v[1]);
}

} // namespace hopf_detail

std::string_view to_string(HopfDirection v)
{
    return v == HopfDirection::Supercritical ? "Supercritical" : "Subcritical";
}

std::string_view to_string(OrbitStability v)
{
    return v == OrbitStability::Stable ? "Stable" : "Unstable";
}

std::string_view to_string(PeriodTrend v)
{
    return v == PeriodTrend::Increasing ? "Increasing" : "Decreasing";
}

HopfContext make_hopf_context(const ModelParams& params, double tau2_fixed, const FrequencyScanOptions& opt)
{
    HopfContext ctx;
    ctx.params = params;
    ctx.eq = interior_equilibrium(params);
    ctx.coeffs = char_coefficients(params, ctx.eq);
    const auto crit = case3_critical(ctx.coeffs, tau2_fixed, opt);
    ctx.tau1_crit = *crit.tau_star;
    ctx.tau2_fixed = tau2_fixed;
    ctx.omega = *crit.omega_star;
    ctx.lambda_prime = root_velocity(ctx.coeffs, ctx.tau1_crit, tau2_fixed, cplx(0.0, ctx.omega), DelayAxis::Tau1);
    ctx.params.tau1 = ctx.tau1_crit;
    ctx.params.tau2 = tau2_fixed;
    return ctx;
}

HopfVectors eigenvectors(const HopfContext& ctx)
{
    if (!(ctx.omega > 0.0))
        throw std::invalid_argument("eigenvectors: crossing frequency must be positive");
    const Linearization L = linearization(ctx.params, ctx.eq);
    const double w = ctx.omega;
    HopfVectors v;
    // Second row of the characteristic matrix at i w: -b31 e^{-i w tau2} + i w q1 = 0.
    v.q1 = L.b31 * expi(-w * ctx.tau2_fixed) / (I * w);
    // Adjoint row vector (1, conj q1*) annihilates the second column (a12, i w).
    v.q1_star = L.a12 / (I * w);
    // <q*, q> = D_bar (1, conj q1*) [I + tau1 B2 e^{-i w tau1} + tau2 B3 e^{-i w tau2}] (1, q1)^T.
    const cplx qs_conj = std::conj(v.q1_star);
    v.normalization_denominator = 1.0 + qs_conj * v.q1 - ctx.tau1_crit * L.Bc * expi(-w * ctx.tau1_crit) +
                                  ctx.tau2_fixed * qs_conj * L.b31 * expi(-w * ctx.tau2_fixed);
    if (std::abs(v.normalization_denominator) < degeneracy_tol)
        throw DegenerateNormalizationError("eigenvectors: normalization denominator vanishes");
    v.D_bar = 1.0 / v.normalization_denominator;
    return v;
}

GCoefficients quadratic_coefficients(const HopfContext& ctx, const HopfVectors& vecs)
{
    using namespace hopf_detail;
    const Samples P = mode_samples(vecs.q1, ctx.omega, ctx.tau1_crit, ctx.tau2_fixed);
    const Samples Pb = conj_samples(P);
    const cplx qs = std::conj(vecs.q1_star);
    GCoefficients g;
    g.g20 = project(ctx.tau1_crit, vecs.D_bar, qs, bilinear(ctx.params, ctx.eq, P, P));
    g.g11 = project(ctx.tau1_crit, vecs.D_bar, qs, bilinear(ctx.params, ctx.eq, P, Pb));
    g.g02 = project(ctx.tau1_crit, vecs.D_bar, qs, bilinear(ctx.params, ctx.eq, Pb, Pb));
    return g;
}

CenterManifoldTerms center_manifold_terms(const HopfContext& ctx, const HopfVectors& vecs, cplx g20, cplx g11,
                                          cplx g02)
{
    using namespace hopf_detail;
    const double w = ctx.omega;
    const double wt = w * ctx.tau1_crit;
    const Samples P = mode_samples(vecs.q1, w, ctx.tau1_crit, ctx.tau2_fixed);
    const Samples Pb = conj_samples(P);

    CenterManifoldTerms t;
    // E1 solves Delta(2 i w) E1 = B(P, P); the delayed blocks carry e^{-2 i w tau}.
    t.E1 = solve2(char_matrix(ctx.params, ctx.eq, ctx.tau1_crit, ctx.tau2_fixed, cplx(0.0, 2.0 * w)),
                  bilinear(ctx.params, ctx.eq, P, P), "E1");
    // E2 solves Delta(0) E2 = B(P, conj P).
    t.E2 = solve2(char_matrix(ctx.params, ctx.eq, ctx.tau1_crit, ctx.tau2_fixed, cplx(0.0, 0.0)),
                  bilinear(ctx.params, ctx.eq, P, Pb), "E2");

    const CVec2 q0{1.0, vecs.q1};
    const CVec2 q0b{1.0, std::conj(vecs.q1)};
    auto W20 = [&](double lag) {
        CVec2 out;
        for (int i = 0; i < 2; ++i)
            out[i] = (I * g20 / wt) * q0[i] * expi(w * lag) + (I * std::conj(g02) / (3.0 * wt)) * q0b[i] * expi(-w * lag) +
                     t.E1[i] * expi(2.0 * w * lag);
        return out;
    };
    auto W11 = [&](double lag) {
        CVec2 out;
        for (int i = 0; i < 2; ++i)
            out[i] = -(I * g11 / wt) * q0[i] * expi(w * lag) + (I * std::conj(g11) / wt) * q0b[i] * expi(-w * lag) +
                     t.E2[i];
        return out;
    };
    t.W20_0 = W20(0.0);
    t.W20_tau1 = W20(-ctx.tau1_crit);
    t.W20_tau2 = W20(-ctx.tau2_fixed);
    t.W11_0 = W11(0.0);
    t.W11_tau1 = W11(-ctx.tau1_crit);
    t.W11_tau2 = W11(-ctx.tau2_fixed);
    return t;
}

GCoefficients g_coefficients(const HopfContext& ctx, const HopfVectors& vecs, const CenterManifoldTerms& w)
{
    using namespace hopf_detail;
    GCoefficients g = quadratic_coefficients(ctx, vecs);
    const Samples P = mode_samples(vecs.q1, ctx.omega, ctx.tau1_crit, ctx.tau2_fixed);
    const Samples Pb = conj_samples(P);
    const Samples W20 = field_samples(w.W20_0, w.W20_tau1, w.W20_tau2);
    const Samples W11 = field_samples(w.W11_0, w.W11_tau1, w.W11_tau2);
    const CVec2 cubic = trilinear(ctx.params, ctx.eq, P, P, Pb);
    const CVec2 b20 = bilinear(ctx.params, ctx.eq, Pb, W20);
    const CVec2 b11 = bilinear(ctx.params, ctx.eq, P, W11);
    const CVec2 total{cubic[0] + b20[0] + 2.0 * b11[0], cubic[1] + b20[1] + 2.0 * b11[1]};
    g.g21 = project(ctx.tau1_crit, vecs.D_bar, std::conj(vecs.q1_star), total);
    return g;
}

HopfReport classify(const HopfContext& ctx)
{
    const HopfVectors vecs = eigenvectors(ctx);
    const GCoefficients quad = quadratic_coefficients(ctx, vecs);
    const CenterManifoldTerms cm = center_manifold_terms(ctx, vecs, quad.g20, quad.g11, quad.g02);
    const GCoefficients g = g_coefficients(ctx, vecs, cm);

    HopfReport rep;
    rep.q1 = vecs.q1;
    rep.q1_star = vecs.q1_star;
    rep.D_bar = vecs.D_bar;
    rep.g20 = g.g20;
    rep.g11 = g.g11;
    rep.g02 = g.g02;
    rep.g21 = g.g21;
    rep.E1 = cm.E1;
    rep.E2 = cm.E2;
    rep.W20_0 = cm.W20_0;
    rep.W20_tau1 = cm.W20_tau1;
    rep.W20_tau2 = cm.W20_tau2;
    rep.W11_0 = cm.W11_0;
    rep.W11_tau1 = cm.W11_tau1;
    rep.W11_tau2 = cm.W11_tau2;

    const double wt = ctx.omega * ctx.tau1_crit;
    rep.c1_0 = I / (2.0 * wt) * (g.g20 * g.g11 - 2.0 * std::norm(g.g11) - std::norm(g.g02) / 3.0) + g.g21 / 2.0;
    rep.lambda_prime = ctx.lambda_prime;
    rep.mu2 = -rep.c1_0.real() / ctx.lambda_prime.real();
    rep.beta2 = 2.0 * rep.c1_0.real();
    rep.T2 = -(rep.c1_0.imag() + rep.mu2 * ctx.lambda_prime.imag()) / wt;
    rep.direction = rep.mu2 > 0 ? HopfDirection::Supercritical : HopfDirection::Subcritical;
    rep.orbit_stability = rep.beta2 < 0 ? OrbitStability::Stable : OrbitStability::Unstable;
    rep.period_trend = rep.T2 > 0 ? PeriodTrend::Increasing : PeriodTrend::Decreasing;
    return rep;
}

} // namespace refugia
