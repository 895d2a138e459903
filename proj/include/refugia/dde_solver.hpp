#pragma once

#include "refugia/model.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace refugia {

/// Uniformly sampled solution with node derivatives for dense output.
struct Trajectory {
    ModelParams params;
    double step = 0.0;
    std::vector<double> times;
    std::vector<State> states;
    std::vector<State> derivatives;

    std::size_t size() const { return times.size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }

    /// Hermite interpolation; t <= 0 returns the initial state.
    State at(double t) const;
};

struct IntegrateOptions {
    /// Replace negative components by zero instead of failing.
    bool clamp_negative = false;
};

/// Throws ConfigError unless step > 0 and step <= tau / 4 for every positive delay.
void check_step(const ModelParams& p, double step);

/// Nodes the history must retain for the given delays and step.
std::size_t history_capacity(const ModelParams& p, double step);

/// Fourth-order method of steps from the constant history phi on [-max delay, 0].
/// Throws NonFiniteStateError, NegativeStateError, ConfigError.
Trajectory integrate(const ModelParams& p, State phi, double horizon, double step,
                     const IntegrateOptions& opt = {});

/// Same scheme, bounded memory: observer(t, state) sees every node including t = 0.
void integrate_streaming(const ModelParams& p, State phi, double horizon, double step,
                         const std::function<void(double, State)>& observer, const IntegrateOptions& opt = {});

/// Variational equation along base with constant perturbation history v_phi.
/// The returned trajectory holds the perturbation (components may be negative).
Trajectory linearized_integrate(const ModelParams& p, const Trajectory& base, State v_phi);

} // namespace refugia
