#include "refugia/model.hpp"

#include "refugia/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace refugia {

namespace {

void require(bool ok, const char* field, const char* rule, double value)
{
    if (!ok) {
        std::ostringstream os;
        os << "invalid parameter '" << field << "' = " << value << ": must be " << rule;
        throw ConfigError(os.str());
    }
}

} // namespace

void ModelParams::validate() const
{
    require(std::isfinite(r) && r > 0, "r", "> 0", r);
    require(std::isfinite(k) && k > 0, "k", "> 0", k);
    require(std::isfinite(alpha) && alpha > 0, "alpha", "> 0", alpha);
    require(std::isfinite(m) && m >= 0 && m < 1, "m", "in [0, 1)", m);
    require(std::isfinite(h) && h > 0, "h", "> 0", h);
    require(std::isfinite(theta) && theta > 0, "theta", "> 0", theta);
    require(std::isfinite(d) && d > 0, "d", "> 0", d);
    require(std::isfinite(tau1) && tau1 >= 0, "tau1", ">= 0", tau1);
    require(std::isfinite(tau2) && tau2 >= 0, "tau2", ">= 0", tau2);
}

std::string_view to_string(EquilibriumKind kind)
{
    switch (kind) {
    case EquilibriumKind::Origin:
        return "Origin";
    case EquilibriumKind::AxialPreyOnly:
        return "AxialPreyOnly";
    case EquilibriumKind::Interior:
        return "Interior";
    }
    return "?";
}

double response(const ModelParams& p, double x)
{
    const double a = p.effective_attack();
    return a * x / (1.0 + a * p.h * x);
}

double response_slope(const ModelParams& p, double x)
{
    const double a = p.effective_attack();
    const double den = 1.0 + a * p.h * x;
    return a / (den * den);
}

State rhs(const ModelParams& p, State current, double x_lag1, double x_lag2)
{
    const double g_now = response(p, current.x);
    const double g_lag = response(p, x_lag2);
    return {p.r * current.x * (1.0 - x_lag1 / p.k) - g_now * current.y,
            current.y * (p.theta * g_lag - p.d)};
}

double refuge_upper_bound(const ModelParams& p)
{
    return 1.0 - p.d / (p.alpha * p.k * (p.theta - p.h * p.d));
}

double theta_lower_bound(const ModelParams& p)
{
    return p.h * p.d + p.d / (p.alpha * p.k);
}

Equilibrium interior_equilibrium(const ModelParams& p)
{
    // theta > h d + d/(alpha k) also guarantees theta - h d > 0, so check it first.
    if (!(p.theta > theta_lower_bound(p))) {
        std::ostringstream os;
        os << "interior equilibrium infeasible: theta = " << p.theta
           << " must exceed h d + d/(alpha k) = " << theta_lower_bound(p);
        throw InfeasibleError(os.str());
    }
    if (!(p.m < refuge_upper_bound(p))) {
        std::ostringstream os;
        os << "interior equilibrium infeasible: m = " << p.m
           << " must be below 1 - d/(alpha k (theta - h d)) = " << refuge_upper_bound(p);
        throw InfeasibleError(os.str());
    }
    const double a = p.effective_attack();
    const double xs = p.d / (a * (p.theta - p.h * p.d));
    const double ys = p.r * (p.k - xs) * (1.0 + a * p.h * xs) / (a * p.k);
    return {xs, ys, EquilibriumKind::Interior};
}

std::vector<Equilibrium> boundary_equilibria(const ModelParams& p)
{
    return {{0.0, 0.0, EquilibriumKind::Origin}, {p.k, 0.0, EquilibriumKind::AxialPreyOnly}};
}

PersistenceReport persistence_conditions(const ModelParams& p)
{
    PersistenceReport rep;
    rep.theta_min = theta_lower_bound(p);
    rep.theta_bound = p.theta > rep.theta_min;
    rep.m_bound = refuge_upper_bound(p);
    rep.feasible_m_bound = p.theta > p.h * p.d && p.m < rep.m_bound;
    rep.holds = rep.feasible_m_bound && rep.theta_bound;
    rep.note = "weight condition beta1/beta2 > d/r = " + std::to_string(p.d / p.r) +
               " is satisfiable by choice of positive weights";
    return rep;
}

NondelayStabilityReport nondelay_stability_conditions(const ModelParams& p)
{
    NondelayStabilityReport rep;
    const double akh = p.alpha * p.k * p.h;
    const double hd = p.h * p.d;
    rep.alpha_min = 1.0 / (p.k * p.h);
    rep.alpha_cond = p.alpha > rep.alpha_min;

    const double from_window = akh > 1.0 ? hd * (akh + 1.0) / (akh - 1.0)
                                         : std::numeric_limits<double>::infinity();
    rep.theta_min = std::max(from_window, theta_lower_bound(p));
    rep.theta_cond = p.theta > rep.theta_min;

    rep.m_lower = 1.0 - (p.theta + hd) / (akh * (p.theta - hd));
    rep.m_upper = refuge_upper_bound(p);
    rep.m_window = p.theta > hd && rep.m_lower < p.m && p.m < rep.m_upper;

    rep.stable = rep.alpha_cond && rep.theta_cond && rep.m_window;
    return rep;
}

} // namespace refugia
