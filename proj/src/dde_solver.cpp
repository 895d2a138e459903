#include "refugia/dde_solver.hpp"

#include "refugia/errors.hpp"
#include "refugia/method_of_steps.hpp"

#include <cmath>
#include <sstream>

namespace refugia {

namespace {

std::size_t step_count(double horizon, double step)
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw ConfigError("step must be a positive finite number");
    if (!(horizon >= step) || !std::isfinite(horizon))
        throw ConfigError("horizon must be finite and at least one step");
    return static_cast<std::size_t>(std::llround(horizon / step));
}

void check_state(double t, std::span<double> y, const IntegrateOptions& opt)
{
    for (double& v : y) {
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "non-finite state at t = " << t << " (step too large?)";
            throw NonFiniteStateError(os.str());
        }
        if (v < 0.0) {
            if (opt.clamp_negative) {
                v = 0.0;
                continue;
            }
            std::ostringstream os;
            os << "negative state " << v << " at t = " << t;
            throw NegativeStateError(os.str());
        }
    }
}

auto model_field(const ModelParams& p)
{
    return [p](double, std::span<const double> y, const LagView& lag, std::span<double> out) {
        const State d = rhs(p, {y[0], y[1]}, lag(0, p.tau1), lag(0, p.tau2));
        out[0] = d.x;
        out[1] = d.y;
    };
}

void check_phi(State phi)
{
    if (!(phi.x > 0.0) || !(phi.y > 0.0) || !std::isfinite(phi.x) || !std::isfinite(phi.y))
        throw ConfigError("initial history must be componentwise positive");
}

} // namespace

State Trajectory::at(double t) const
{
    if (times.empty())
        throw std::logic_error("Trajectory::at on an empty trajectory");
    if (t <= 0.0)
        return states.front();
    const double u = t / step;
    auto j = static_cast<std::size_t>(u);
    if (j >= size() - 1) {
        if (j == size() - 1 && u - static_cast<double>(j) <= 1e-9)
            return states.back();
        throw std::out_of_range("Trajectory::at beyond the horizon");
    }
    const double s = u - static_cast<double>(j);
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    const State& a = states[j];
    const State& b = states[j + 1];
    const State& da = derivatives[j];
    const State& db = derivatives[j + 1];
    return {h00 * a.x + h10 * step * da.x + h01 * b.x + h11 * step * db.x,
            h00 * a.y + h10 * step * da.y + h01 * b.y + h11 * step * db.y};
}

void check_step(const ModelParams& p, double step)
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw ConfigError("step must be a positive finite number");
    for (double tau : {p.tau1, p.tau2}) {
        if (tau > 0.0 && step > tau / 4.0 * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "step " << step << " exceeds a quarter of the delay " << tau;
            throw ConfigError(os.str());
        }
    }
}

std::size_t history_capacity(const ModelParams& p, double step)
{
    return static_cast<std::size_t>(std::ceil(p.max_delay() / step)) + 4;
}

Trajectory integrate(const ModelParams& p, State phi, double horizon, double step, const IntegrateOptions& opt)
{
    p.validate();
    check_phi(phi);
    check_step(p, step);
    const std::size_t n = step_count(horizon, step);

    MethodOfSteps engine(2, step, {phi.x, phi.y}, model_field(p));
    for (std::size_t i = 0; i < n; ++i) {
        engine.advance();
        auto front = engine.history().value(engine.history().front_node());
        check_state(engine.time(), front, opt);
    }
    engine.complete_front();

    Trajectory out;
    out.params = p;
    out.step = step;
    out.times.resize(n + 1);
    out.states.resize(n + 1);
    out.derivatives.resize(n + 1);
    const auto& h = engine.history();
    for (std::size_t i = 0; i <= n; ++i) {
        out.times[i] = h.node_time(i);
        out.states[i] = {h.value(i)[0], h.value(i)[1]};
        out.derivatives[i] = {h.derivative(i)[0], h.derivative(i)[1]};
    }
    return out;
}

void integrate_streaming(const ModelParams& p, State phi, double horizon, double step,
                         const std::function<void(double, State)>& observer, const IntegrateOptions& opt)
{
    p.validate();
    check_phi(phi);
    check_step(p, step);
    const std::size_t n = step_count(horizon, step);

    MethodOfSteps engine(2, step, {phi.x, phi.y}, model_field(p), history_capacity(p, step));
    observer(0.0, phi);
    for (std::size_t i = 0; i < n; ++i) {
        engine.advance();
        auto front = engine.history().value(engine.history().front_node());
        check_state(engine.time(), front, opt);
        observer(engine.time(), {front[0], front[1]});
    }
}

Trajectory linearized_integrate(const ModelParams& p, const Trajectory& base, State v_phi)
{
    p.validate();
    check_step(p, base.step);
    if (base.size() < 2)
        throw ConfigError("base trajectory must cover at least one step");
    const std::size_t n = base.size() - 1;

    auto field = [&p, &base](double t, std::span<const double> v, const LagView& lag, std::span<double> out) {
        const State now = base.at(t);
        const double x1 = base.at(t - p.tau1).x;
        const double x2 = base.at(t - p.tau2).x;
        const double dv1 = lag(0, p.tau1);
        const double dv2 = lag(0, p.tau2);
        out[0] = (p.r * (1.0 - x1 / p.k) - response_slope(p, now.x) * now.y) * v[0] - p.r * now.x / p.k * dv1 -
                 response(p, now.x) * v[1];
        out[1] = (p.theta * response(p, x2) - p.d) * v[1] + p.theta * response_slope(p, x2) * now.y * dv2;
    };
    MethodOfSteps engine(2, base.step, {v_phi.x, v_phi.y}, field);
    for (std::size_t i = 0; i < n; ++i) {
        engine.advance();
        for (double v : engine.state())
            if (!std::isfinite(v))
                throw NonFiniteStateError("non-finite perturbation state");
    }
    engine.complete_front();

    Trajectory out;
    out.params = p;
    out.step = base.step;
    const auto& h = engine.history();
    for (std::size_t i = 0; i <= n; ++i) {
        out.times.push_back(h.node_time(i));
        out.states.push_back({h.value(i)[0], h.value(i)[1]});
        out.derivatives.push_back({h.derivative(i)[0], h.derivative(i)[1]});
    }
    return out;
}

} // namespace refugia
