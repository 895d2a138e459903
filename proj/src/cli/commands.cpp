#include "cli_internal.hpp"

#include "refugia/dde_solver.hpp"
#include "refugia/errors.hpp"
#include "refugia/hopf.hpp"
#include "refugia/linear_stability.hpp"
#include "refugia/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace refugia::cli {

namespace {

std::string brief(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

/// "0.2176 (0.21755261613337615)"
std::string both(double v)
{
    return brief(v) + " (" + format_number(v) + ")";
}

std::string yes(bool b)
{
    return b ? "true" : "false";
}

std::string complex_text(cplx z)
{
    return format_number(z.real()) + (z.imag() < 0 ? " - " : " + ") + format_number(std::abs(z.imag())) + "i";
}

ScanGrid grid_from(const RunConfig& cfg)
{
    ScanGrid g;
    g.fixed = cfg.params;
    g.phi = cfg.phi;
    g.settings = cfg.diag;
    g.settings.step = cfg.step;
    g.continuation = cfg.continuation;
    return g;
}

void append_peaks(std::ostringstream& os, const ScanRow& row)
{
    const std::string tail = "," + row.verdict.label() + "," + std::to_string(row.verdict.peak_clusters) + "," +
                             format_number(row.verdict.lle) + "\n";
    const std::string x = format_number(row.axis1_value);
    if (row.verdict.peak_values.empty() || row.verdict.kind == AttractorKind::FixedPoint) {
        const double y = row.error ? NAN : row.verdict.final_state.y;
        os << x << "," << format_number(y) << tail;
        return;
    }
    for (double peak : row.verdict.peak_values)
        os << x << "," << format_number(peak) << tail;
}

} // namespace

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text)
{
    if (cfg.output.empty())
        out << text;
    else
        write_atomic(cfg.output, text);
}

std::string cmd_equilibrium(const RunConfig& cfg)
{
    const ModelParams& p = cfg.params;
    std::ostringstream os;
    bool feasible = true;
    Equilibrium e;
    try {
        e = interior_equilibrium(p);
    } catch (const InfeasibleError& err) {
        feasible = false;
        os << "interior equilibrium: infeasible (" << err.what() << ")\n";
    }
    if (feasible) {
        os << "x* = " << both(e.x_star) << "\n";
        os << "y* = " << both(e.y_star) << "\n";
        os << "kind = " << to_string(e.kind) << "\n";
    }
    os << "feasible = " << yes(feasible) << "\n";
    for (const auto& b : boundary_equilibria(p))
        os << "boundary " << to_string(b.kind) << " = (" << format_number(b.x_star) << ", "
           << format_number(b.y_star) << ")\n";

    const auto per = persistence_conditions(p);
    os << "persistence.holds = " << yes(per.holds) << "\n";
    os << "persistence.m_bound = " << yes(per.feasible_m_bound) << " (m < " << format_number(per.m_bound) << ")\n";
    os << "persistence.theta_bound = " << yes(per.theta_bound) << " (theta > " << format_number(per.theta_min)
       << ")\n";
    os << "persistence.note = " << per.note << "\n";

    const auto st = nondelay_stability_conditions(p);
    os << "undelayed.stable = " << yes(st.stable) << "\n";
    os << "undelayed.alpha_cond = " << yes(st.alpha_cond) << " (alpha > " << format_number(st.alpha_min) << ")\n";
    os << "undelayed.theta_cond = " << yes(st.theta_cond) << " (theta > " << format_number(st.theta_min) << ")\n";
    os << "undelayed.m_window = " << yes(st.m_window) << " (" << format_number(st.m_lower) << " < m < "
       << format_number(st.m_upper) << ")\n";
    if (feasible) {
        const auto c = char_coefficients(p, e);
        os << "A = " << format_number(c.A) << "\nB = " << format_number(c.B) << "\nC = " << format_number(c.C)
           << "\n";
    }
    return os.str();
}

std::string cmd_critical(const RunConfig& cfg)
{
    const auto c = char_coefficients(cfg.params, interior_equilibrium(cfg.params));
    FrequencyScanOptions opt;
    opt.n_max = cfg.n_max;
    CriticalDelayResult res;
    switch (cfg.case_id) {
    case 2:
        res = case2_critical(c, cfg.n_max);
        break;
    case 3:
        res = case3_critical(c, cfg.params.tau2, opt);
        break;
    case 4:
        res = case4_critical(c, cfg.n_max);
        break;
    default:
        res = case5_critical(c, cfg.params.tau1, opt);
        break;
    }
    std::ostringstream os;
    os << "case = " << to_string(res.case_id) << "\n";
    if (res.fixed_delay)
        os << "fixed = " << to_string(res.fixed_delay->axis) << " = " << format_number(res.fixed_delay->value) << "\n";
    os << "free = " << to_string(res.free_axis) << "\n";
    os << "frequencies =";
    for (double w : res.frequencies)
        os << " " << format_number(w);
    os << "\n";
    os << "omega = " << both(*res.omega_star) << "\n";
    os << to_string(res.free_axis) << "_critical = " << both(*res.tau_star) << "\n";
    if (res.closed_form_indicator)
        os << "closed_form_indicator = " << format_number(*res.closed_form_indicator) << "\n";
    os << "omega,branch,tau_critical,transversality,velocity_re,velocity_im,degenerate\n";
    for (const auto& r : res.roots)
        os << format_number(r.omega) << "," << r.branch_index << "," << format_number(r.tau_critical) << ","
           << static_cast<int>(r.transversality_sign) << "," << format_number(r.velocity.real()) << ","
           << format_number(r.velocity.imag()) << "," << yes(r.degenerate) << "\n";
    return os.str();
}

std::string cmd_hopf(const RunConfig& cfg)
{
    FrequencyScanOptions opt;
    opt.n_max = cfg.n_max;
    const auto ctx = make_hopf_context(cfg.params, cfg.params.tau2, opt);
    const auto rep = classify(ctx);
    std::ostringstream os;
    os << "tau2_fixed = " << format_number(ctx.tau2_fixed) << "\n";
    os << "tau1_critical = " << both(ctx.tau1_crit) << "\n";
    os << "omega = " << both(ctx.omega) << "\n";
    os << "lambda_prime = " << complex_text(rep.lambda_prime) << "\n";
    os << "q1 = " << complex_text(rep.q1) << "\n";
    os << "q1_star = " << complex_text(rep.q1_star) << "\n";
    os << "D_bar = " << complex_text(rep.D_bar) << "\n";
    os << "g20 = " << complex_text(rep.g20) << "\n";
    os << "g11 = " << complex_text(rep.g11) << "\n";
    os << "g02 = " << complex_text(rep.g02) << "\n";
    os << "g21 = " << complex_text(rep.g21) << "\n";
    os << "E1 = (" << complex_text(rep.E1[0]) << ", " << complex_text(rep.E1[1]) << ")\n";
    os << "E2 = (" << complex_text(rep.E2[0]) << ", " << complex_text(rep.E2[1]) << ")\n";
    os << "c1 = " << complex_text(rep.c1_0) << "\n";
    os << "mu2 = " << format_number(rep.mu2) << "\n";
    os << "beta2 = " << format_number(rep.beta2) << "\n";
    os << "T2 = " << format_number(rep.T2) << "\n";
    os << "direction = " << to_string(rep.direction) << "\n";
    os << "orbit_stability = " << to_string(rep.orbit_stability) << "\n";
    os << "period_trend = " << to_string(rep.period_trend) << "\n";
    return os.str();
}

std::string cmd_simulate(const RunConfig& cfg)
{
    IntegrateOptions opt;
    opt.clamp_negative = cfg.clamp_negative;
    std::ostringstream os;
    os << "t,x,y\n";
    std::size_t i = 0;
    integrate_streaming(cfg.params, cfg.phi, cfg.horizon, cfg.step, [&](double t, State s) {
        if (i++ % static_cast<std::size_t>(cfg.every) == 0)
            os << format_number(t) << "," << format_number(s.x) << "," << format_number(s.y) << "\n";
    }, opt);
    return os.str();
}

std::string cmd_lyapunov(const RunConfig& cfg)
{
    LyapunovSettings s;
    s.transient = cfg.lyapunov_transient;
    s.window = cfg.window;
    s.step = cfg.step;
    s.ortho_interval = cfg.diag.ortho_interval;
    const auto spec = lyapunov_spectrum(cfg.params, cfg.phi, cfg.n_exp, s);
    std::ostringstream os;
    os << "index,exponent\n";
    for (std::size_t i = 0; i < spec.exponents.size(); ++i)
        os << i + 1 << "," << format_number(spec.exponents[i]) << "\n";
    return os.str();
}

std::string cmd_bifurcation(const RunConfig& cfg)
{
    ScanGrid g = grid_from(cfg);
    g.axis1 = {parse_axis_name(cfg.axis), cfg.lo, cfg.hi, cfg.n};
    const auto res = bifurcation_scan(g, {cfg.threads});
    std::ostringstream os;
    os << "axis_value,peak_y,verdict,clusters,lle\n";
    for (const auto& row : res.rows)
        append_peaks(os, row);
    return os.str();
}

std::pair<std::string, std::string> cmd_region(const RunConfig& cfg)
{
    ScanGrid g = grid_from(cfg);
    g.axis1 = {ScanAxisName::Tau1, cfg.tau1_lo, cfg.tau1_hi, cfg.tau1_n};
    g.axis2 = ScanAxis{ScanAxisName::Tau2, cfg.tau2_lo, cfg.tau2_hi, cfg.tau2_n};
    const auto res = region_scan(g, {cfg.threads});
    std::ostringstream cells;
    cells << "tau1,tau2,verdict,clusters,lle\n";
    for (const auto& row : res.cells.rows)
        cells << format_number(row.axis1_value) << "," << format_number(*row.axis2_value) << ","
              << row.verdict.label() << "," << row.verdict.peak_clusters << "," << format_number(row.verdict.lle)
              << "\n";
    std::ostringstream overlay;
    overlay << "curve,tau1,tau2\n";
    for (const auto& curve : res.overlay)
        for (auto [t1, t2] : curve.points)
            overlay << curve.label << "," << format_number(t1) << "," << format_number(t2) << "\n";
    return {cells.str(), overlay.str()};
}

std::string cmd_refuge(const RunConfig& cfg)
{
    ScanGrid g = grid_from(cfg);
    g.axis1 = {ScanAxisName::Refuge, cfg.lo, cfg.hi, cfg.n};
    const auto res = refuge_sweep(g, {cfg.threads}, false);
    std::ostringstream os;
    os << "m,feasible,omega0,tau2_0,omega1,tau1_0\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("nan"); };
    for (const auto& r : res.critical)
        os << format_number(r.m) << "," << yes(r.feasible) << "," << opt(r.omega0) << "," << opt(r.tau2_0) << ","
           << opt(r.omega1) << "," << opt(r.tau1_0) << "\n";
    os << "# tau2_0 trend: " << to_string(res.tau2_0_trend) << "\n";
    os << "# tau1_0 trend: " << to_string(res.tau1_0_trend) << "\n";
    return os.str();
}

} // namespace refugia::cli
