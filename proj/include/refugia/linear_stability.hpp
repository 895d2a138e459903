#pragma once

#include "refugia/model.hpp"

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

namespace refugia {

using cplx = std::complex<double>;

/// Coefficients of the characteristic quasi-polynomial
///     P(lambda) = lambda^2 + A lambda + B lambda e^{-lambda tau1} + C e^{-lambda tau2}
/// at the interior equilibrium. A < 0, B > 0, C > 0 there.
struct CharCoefficients {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
};

/// Throws std::invalid_argument for non-interior equilibria.
CharCoefficients char_coefficients(const ModelParams& p, const Equilibrium& eq);

cplx char_eval(const CharCoefficients& c, double tau1, double tau2, cplx lambda);

/// dP/dlambda.
cplx char_dlambda(const CharCoefficients& c, double tau1, double tau2, cplx lambda);

enum class DelayAxis { Tau1, Tau2 };

std::string_view to_string(DelayAxis axis);

/// Velocity d lambda / d tau_axis of a simple root, by implicit differentiation of P.
cplx root_velocity(const CharCoefficients& c, double tau1, double tau2, cplx lambda, DelayAxis axis);

enum class DelayCase { I, II, III, IV, V };

std::string_view to_string(DelayCase c);

enum class Transversality { Negative = -1, Undetermined = 0, Positive = 1 };

struct FixedDelay {
    DelayAxis axis = DelayAxis::Tau2;
    double value = 0.0;
};

struct CriticalRoot {
    double omega = 0.0;        ///< crossing frequency > 0
    double tau_critical = 0.0; ///< value of the free delay on this branch
    int branch_index = 0;      ///< n in tau_n = (angle + 2 n pi) / omega
    Transversality transversality_sign = Transversality::Undetermined;
    cplx velocity{};           ///< d lambda / d tau_free at the crossing
    bool degenerate = false;   ///< tangency of the frequency function (double root)
};

struct CriticalDelayResult {
    DelayCase case_id = DelayCase::II;
    std::optional<FixedDelay> fixed_delay;
    DelayAxis free_axis = DelayAxis::Tau2;
    std::vector<double> frequencies;  ///< distinct positive frequency roots, ascending
    std::vector<CriticalRoot> roots;  ///< every (frequency, branch) pair, frequency-major
    std::optional<double> tau_star;   ///< minimum branch-0 delay
    std::optional<double> omega_star; ///< frequency attaining tau_star
    /// Cases II and IV: the textbook sign indicator for the crossing direction,
    /// (2 w^2 + (A+B)^2) / C^2 and (M + 2 w^2) / (B^2 w^2), M = A^2 - B^2 - 2C,
    /// evaluated at the tau_star frequency.
    std::optional<double> closed_form_indicator;
};

struct FrequencyScanOptions {
    double omega_max = 0.0; ///< <= 0 selects 10 max(1, sqrt(C))
    int scan_intervals = 4096;
    double bisection_tol = 1e-12;
    double tangency_tol = 1e-9;
    int n_max = 3;
};

/// tau1 = 0, tau2 free.
CriticalDelayResult case2_critical(const CharCoefficients& c, int n_max = 3);

/// tau2 fixed in its stable range, tau1 free. Throws NoHopfError without a root.
CriticalDelayResult case3_critical(const CharCoefficients& c, double tau2_fixed,
                                   const FrequencyScanOptions& opt = {});

/// tau2 = 0, tau1 free. Throws NoHopfError without a positive biquadratic root.
CriticalDelayResult case4_critical(const CharCoefficients& c, int n_max = 3);

/// tau1 fixed in its stable range, tau2 free. Throws NoHopfError without a root.
CriticalDelayResult case5_critical(const CharCoefficients& c, double tau1_fixed,
                                   const FrequencyScanOptions& opt = {});

/// Frequency functions whose positive zeros are the crossing frequencies.
double case3_frequency_function(const CharCoefficients& c, double tau2, double omega);
double case5_frequency_function(const CharCoefficients& c, double tau1, double omega);

/// Straight path in the delay plane, sampled at steps + 1 points.
struct DelayPath {
    double tau1_begin = 0.0;
    double tau1_end = 0.0;
    double tau2_begin = 0.0;
    double tau2_end = 0.0;
    int steps = 100;
};

struct ComplexRoot {
    double tau1 = 0.0;
    double tau2 = 0.0;
    cplx lambda{};
};

struct NewtonOptions {
    int max_iterations = 50;
    double tol = 1e-13;
};

/// Newton polish of a root at fixed delays. Throws NewtonDivergenceError.
cplx refine_root(const CharCoefficients& c, double tau1, double tau2, cplx seed,
                 const NewtonOptions& opt = {});

/// Continues a characteristic root along a delay path (Euler predictor,
/// Newton corrector). Throws NewtonDivergenceError.
std::vector<ComplexRoot> root_track(const CharCoefficients& c, const DelayPath& path, cplx lambda_seed,
                                    const NewtonOptions& opt = {});

/// Upper-half-plane root of lambda^2 + (A+B) lambda + C = 0 (both delays zero).
cplx undelayed_root(const CharCoefficients& c);

/// Rightmost root reached by continuing the undelayed root pair from (0, 0).
cplx tracked_dominant_root(const CharCoefficients& c, double tau1, double tau2, int steps = 200);

} // namespace refugia
