#pragma once

#include "refugia/linear_stability.hpp"
#include "refugia/model.hpp"

#include <array>
#include <complex>
#include <string_view>

namespace refugia {

/// Critical point of the tau1-Hopf bifurcation with tau2 held fixed.
struct HopfContext {
    ModelParams params;
    Equilibrium eq;
    CharCoefficients coeffs;
    double tau1_crit = 0.0;
    double tau2_fixed = 0.0;
    double omega = 0.0;
    cplx lambda_prime{}; ///< d lambda / d tau1 at (tau1_crit, i omega)
};

/// Builds the context from the minimal tau1 crossing with tau2 fixed.
HopfContext make_hopf_context(const ModelParams& params, double tau2_fixed,
                              const FrequencyScanOptions& opt = {});

using CVec2 = std::array<cplx, 2>;

struct HopfVectors {
    cplx q1{};      ///< q(0) = (1, q1)
    cplx q1_star{}; ///< adjoint q*(0) = D (1, q1_star)
    cplx D_bar{};
    cplx normalization_denominator{}; ///< D_bar * denominator == 1
};

/// Center-manifold coefficient evaluations. Lags are in unscaled time:
/// W(-tau1) means the delayed sample x(t - tau1).
struct CenterManifoldTerms {
    CVec2 E1{};
    CVec2 E2{};
    CVec2 W20_0{}, W20_tau1{}, W20_tau2{};
    CVec2 W11_0{}, W11_tau1{}, W11_tau2{};
};

struct GCoefficients {
    cplx g20{}, g11{}, g02{}, g21{};
};

enum class HopfDirection { Supercritical, Subcritical };
enum class OrbitStability { Stable, Unstable };
enum class PeriodTrend { Increasing, Decreasing };

std::string_view to_string(HopfDirection v);
std::string_view to_string(OrbitStability v);
std::string_view to_string(PeriodTrend v);

struct HopfReport {
    cplx q1{}, q1_star{}, D_bar{};
    cplx g20{}, g11{}, g02{}, g21{};
    CVec2 E1{}, E2{};
    CVec2 W20_0{}, W20_tau1{}, W20_tau2{};
    CVec2 W11_0{}, W11_tau1{}, W11_tau2{};
    cplx c1_0{};
    cplx lambda_prime{};
    double mu2 = 0.0;
    double beta2 = 0.0;
    double T2 = 0.0;
    HopfDirection direction = HopfDirection::Supercritical;
    OrbitStability orbit_stability = OrbitStability::Stable;
    PeriodTrend period_trend = PeriodTrend::Increasing;
};

/// Throws DegenerateNormalizationError when |D_bar denominator| < 1e-12.
HopfVectors eigenvectors(const HopfContext& ctx);

/// g20, g11 and g02. g21 is left zero: it needs the center-manifold terms.
GCoefficients quadratic_coefficients(const HopfContext& ctx, const HopfVectors& vecs);

/// Throws SingularSystemError when either 2x2 determinant is below 1e-12.
CenterManifoldTerms center_manifold_terms(const HopfContext& ctx, const HopfVectors& vecs, cplx g20, cplx g11,
                                          cplx g02);

/// All four coefficients; g21 consumes the center-manifold terms.
GCoefficients g_coefficients(const HopfContext& ctx, const HopfVectors& vecs, const CenterManifoldTerms& w);

HopfReport classify(const HopfContext& ctx);

namespace hopf_detail {

/// Samples (x(0), y(0), x(-tau1), x(-tau2)) of a perturbation.
using Samples = std::array<cplx, 4>;

/// Second derivative of the model right-hand side at E* as a symmetric bilinear form.
CVec2 bilinear(const ModelParams& p, const Equilibrium& eq, const Samples& u, const Samples& v);

/// Third derivative as a symmetric trilinear form.
CVec2 trilinear(const ModelParams& p, const Equilibrium& eq, const Samples& u, const Samples& v,
                const Samples& w);

/// Characteristic matrix lambda I - B1 - B2 e^{-lambda tau1} - B3 e^{-lambda tau2}.
std::array<CVec2, 2> char_matrix(const ModelParams& p, const Equilibrium& eq, double tau1, double tau2,
                                 cplx lambda);

/// tau1 * D * (v1 + qstar_conj * v2): projection onto the critical mode.
cplx project(double tau1, cplx D, cplx qstar_conj, const CVec2& v);

} // namespace hopf_detail

} // namespace refugia
