#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace refugia {

/// Ecological constants of the refuge model plus the two discrete delays.
///
/// Defaults are the reference parameter set used throughout the test-suite
/// (r=2.65, k=898, alpha=0.045, m=0.45, h=0.0437, theta=0.215, d=1.06).
struct ModelParams {
    double r = 2.65;       ///< intrinsic prey growth rate [1/time]
    double k = 898.0;      ///< carrying capacity [biomass]
    double alpha = 0.045;  ///< attack coefficient [1/(biomass time)]
    double m = 0.45;       ///< refuge fraction, 0 <= m < 1
    double h = 0.0437;     ///< handling time [time]
    double theta = 0.215;  ///< conversion efficiency
    double d = 1.06;       ///< predator death rate [1/time]
    double tau1 = 0.0;     ///< prey density-feedback delay [time]
    double tau2 = 0.0;     ///< predator gestation delay [time]

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    double max_delay() const { return tau1 > tau2 ? tau1 : tau2; }

    /// Effective attack rate alpha (1 - m).
    double effective_attack() const { return alpha * (1.0 - m); }

    ModelParams with_delays(double t1, double t2) const
    {
        ModelParams p = *this;
        p.tau1 = t1;
        p.tau2 = t2;
        return p;
    }

    bool operator==(const ModelParams&) const = default;
};

struct State {
    double x = 0.0; ///< prey
    double y = 0.0; ///< predator

    bool operator==(const State&) const = default;
};

enum class EquilibriumKind { Origin, AxialPreyOnly, Interior };

std::string_view to_string(EquilibriumKind kind);

struct Equilibrium {
    double x_star = 0.0;
    double y_star = 0.0;
    EquilibriumKind kind = EquilibriumKind::Interior;
};

/// Refuge-modified Holling II consumption rate g(x) = a x / (1 + a h x), a = alpha (1 - m).
double response(const ModelParams& p, double x);

/// g'(x).
double response_slope(const ModelParams& p, double x);

/// Right-hand side of the two-delay system. x_lag1 = x(t - tau1), x_lag2 = x(t - tau2).
State rhs(const ModelParams& p, State current, double x_lag1, double x_lag2);

/// Coexistence steady state. Throws InfeasibleError outside the feasibility region.
Equilibrium interior_equilibrium(const ModelParams& p);

/// Always [(0,0) Origin, (k,0) AxialPreyOnly].
std::vector<Equilibrium> boundary_equilibria(const ModelParams& p);

/// Upper refuge bound 1 - d / (alpha k (theta - h d)) for a feasible interior state.
double refuge_upper_bound(const ModelParams& p);

/// Lower conversion bound h d + d / (alpha k).
double theta_lower_bound(const ModelParams& p);

struct PersistenceReport {
    bool feasible_m_bound = false; ///< m < 1 - d / (alpha k (theta - h d))
    bool theta_bound = false;      ///< theta > h d + d / (alpha k)
    bool holds = false;
    double m_bound = 0.0;
    double theta_min = 0.0;
    /// The remaining condition ties free weights of an average Lyapunov
    /// function (beta1 / beta2 > d / r); it can always be met and is
    /// reported as text only.
    std::string note;
};

PersistenceReport persistence_conditions(const ModelParams& p);

struct NondelayStabilityReport {
    bool alpha_cond = false; ///< alpha > 1 / (k h)
    bool theta_cond = false; ///< theta > max(h d (alpha k h + 1)/(alpha k h - 1), h d + d/(alpha k))
    bool m_window = false;   ///< m_lower < m < m_upper
    bool stable = false;
    double alpha_min = 0.0;
    double theta_min = 0.0;
    double m_lower = 0.0;
    double m_upper = 0.0;
};

/// Sufficient conditions for stability of E* with both delays zero.
NondelayStabilityReport nondelay_stability_conditions(const ModelParams& p);

} // namespace refugia
