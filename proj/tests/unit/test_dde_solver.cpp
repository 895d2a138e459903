#include "doctest.h"

#include "../support/random_params.hpp"
#include "refugia/dde_solver.hpp"
#include "refugia/errors.hpp"
#include "refugia/linear_stability.hpp"
#include "refugia/method_of_steps.hpp"

#include <algorithm>
#include <cmath>

using namespace refugia;

namespace {

const ModelParams ref{};
const State phi0{30.0, 5.83};

double amplitude_y(const Trajectory& tr, double from, double to)
{
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.times[i] < from || tr.times[i] > to)
            continue;
        lo = std::min(lo, tr.states[i].y);
        hi = std::max(hi, tr.states[i].y);
    }
    return hi - lo;
}

double endpoint_error(const ModelParams& p, double step, const State& reference, double horizon)
{
    const State end = integrate(p, phi0, horizon, step).states.back();
    return std::hypot(end.x - reference.x, end.y - reference.y);
}

} // namespace

TEST_CASE("equilibrium history stays put")
{
    const Equilibrium e = interior_equilibrium(ref);
    for (auto [t1, t2] : {std::pair{0.0, 0.0}, {0.3, 0.18}, {0.7, 0.8}}) {
        const auto tr = integrate(ref.with_delays(t1, t2), {e.x_star, e.y_star}, 100.0, 0.005);
        for (const State& s : tr.states) {
            CHECK(std::abs(s.x - e.x_star) <= 1e-9 * e.x_star);
            CHECK(std::abs(s.y - e.y_star) <= 1e-9 * e.y_star);
        }
    }
}

TEST_CASE("trajectory shape")
{
    const auto tr = integrate(ref.with_delays(0.1, 0.2), phi0, 10.0, 0.005);
    CHECK(tr.size() == 2001);
    CHECK(tr.times.back() == doctest::Approx(10.0));
    CHECK(tr.states.front() == phi0);
    for (std::size_t i = 1; i < tr.size(); ++i)
        CHECK(tr.times[i] - tr.times[i - 1] == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(tr.at(-1.0) == phi0);
    CHECK(tr.at(tr.times[700]).x == tr.states[700].x);
}

TEST_CASE("undelayed run converges to the interior equilibrium")
{
    const Equilibrium e = interior_equilibrium(ref);
    const auto tr = integrate(ref, phi0, 500.0, 0.005);
    CHECK(std::abs(tr.states.back().x - e.x_star) <= 1e-3 * e.x_star);
    CHECK(std::abs(tr.states.back().y - e.y_star) <= 1e-3 * e.y_star);
}

TEST_CASE("gestation delay past the switch sustains oscillation")
{
    const auto tr = integrate(ref.with_delays(0.0, 0.23), phi0, 800.0, 0.005);
    const double early = amplitude_y(tr, 600.0, 700.0);
    const double late = amplitude_y(tr, 700.0, 800.0);
    CHECK(late > 1.0);
    CHECK(late >= 0.99 * early);
}

TEST_CASE("fourth-order convergence without delays")
{
    const double horizon = 10.0;
    const State reference = integrate(ref, phi0, horizon, 0.2 / 64).states.back();
    const double e1 = endpoint_error(ref, 0.2, reference, horizon);
    const double e2 = endpoint_error(ref, 0.1, reference, horizon);
    const double e3 = endpoint_error(ref, 0.05, reference, horizon);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
    CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("fourth-order convergence with grid-aligned delays")
{
    const ModelParams p = ref.with_delays(0.5, 0.25);
    const double horizon = 10.0;
    const State reference = integrate(p, phi0, horizon, 0.0625 / 64).states.back();
    const double e1 = endpoint_error(p, 0.0625, reference, horizon);
    const double e2 = endpoint_error(p, 0.03125, reference, horizon);
    const double e3 = endpoint_error(p, 0.015625, reference, horizon);
    CHECK(e1 / e2 > 12.0);
    CHECK(e2 / e3 > 12.0);
}

TEST_CASE("interpolated lookups reproduce grid values")
{
    const ModelParams p = ref.with_delays(0.5, 0.5);
    const double step = 0.005;
    auto field = [&p](double, std::span<const double> y, const LagView& lag, std::span<double> out) {
        const State d = rhs(p, {y[0], y[1]}, lag(0, p.tau1), lag(0, p.tau2));
        out[0] = d.x;
        out[1] = d.y;
    };
    MethodOfSteps engine(2, step, {phi0.x, phi0.y}, field);
    for (int i = 0; i < 4000; ++i)
        engine.advance();
    engine.complete_front();
    const auto& h = engine.history();
    for (std::size_t node = 100; node + 100 <= h.front_node(); node += 7) {
        const double t = h.front_time() - p.tau1 - static_cast<double>(h.front_node() - node - 100) * step;
        const std::size_t expected = static_cast<std::size_t>(std::llround(t / step));
        CHECK(std::abs(h.interpolate(0, t) - h.value(expected)[0]) <= 1e-12 * h.value(expected)[0]);
    }
}

TEST_CASE("positivity over random feasible parameters")
{
    testing::FeasibleDraws draws(101);
    for (int i = 0; i < 200; ++i) {
        ModelParams p = draws.near_reference();
        p.tau1 = draws.uniform(0.02, 1.0);
        p.tau2 = draws.uniform(0.02, 1.0);
        const Equilibrium e = interior_equilibrium(p);
        const State phi{e.x_star * draws.uniform(0.2, 1.5), e.y_star * draws.uniform(0.2, 1.5)};
        bool positive = true;
        CHECK_NOTHROW(integrate_streaming(p, phi, 200.0, 0.005, [&](double, State s) {
            positive = positive && s.x > 0.0 && s.y > 0.0;
        }));
        CHECK(positive);
    }
}

TEST_CASE("determinism and bounded-memory streaming")
{
    const ModelParams p = ref.with_delays(0.7, 0.8);
    const auto a = integrate(p, phi0, 60.0, 0.005);
    const auto b = integrate(p, phi0, 60.0, 0.005);
    std::size_t i = 0;
    bool same = true;
    integrate_streaming(p, phi0, 60.0, 0.005, [&](double t, State s) {
        same = same && t == a.times[i] && s == a.states[i] && s == b.states[i];
        ++i;
    });
    CHECK(same);
    CHECK(i == a.size());
}

TEST_CASE("input validation")
{
    CHECK_THROWS_AS(integrate(ref.with_delays(0.01, 0.0), phi0, 1.0, 0.005), ConfigError);
    CHECK_NOTHROW(integrate(ref.with_delays(0.02, 0.0), phi0, 1.0, 0.005));
    CHECK_THROWS_AS(integrate(ref, {0.0, 1.0}, 1.0, 0.005), ConfigError);
    CHECK_THROWS_AS(integrate(ref, phi0, 0.001, 0.005), ConfigError);
    CHECK_THROWS_AS(integrate(ref, phi0, 1.0, -0.1), ConfigError);
    CHECK_THROWS_AS(integrate(ref, phi0, 2000.0, 3.0), NumericalError);
}

TEST_CASE("linearized integration")
{
    const ModelParams p = ref.with_delays(0.0, 0.18);
    const Equilibrium e = interior_equilibrium(p);
    const auto base = integrate(p, {e.x_star, e.y_star}, 400.0, 0.005);

    const auto zero = linearized_integrate(p, base, {0.0, 0.0});
    CHECK(std::all_of(zero.states.begin(), zero.states.end(), [](State s) { return s.x == 0.0 && s.y == 0.0; }));

    const auto one = linearized_integrate(p, base, {1.0, 0.5});
    const auto two = linearized_integrate(p, base, {2.0, 1.0});
    for (std::size_t i = 0; i < one.size(); i += 97) {
        CHECK(two.states[i].x == doctest::Approx(2.0 * one.states[i].x).epsilon(1e-12));
        CHECK(two.states[i].y == doctest::Approx(2.0 * one.states[i].y).epsilon(1e-12));
    }

    // Envelope decay at constant base follows the rightmost characteristic root.
    auto envelope = [&](double from, double to) {
        double m = 0.0;
        for (std::size_t i = 0; i < one.size(); ++i)
            if (one.times[i] >= from && one.times[i] < to)
                m = std::max(m, std::abs(one.states[i].x));
        return m;
    };
    const double rate = std::log(envelope(300.0, 400.0) / envelope(200.0, 300.0)) / 100.0;
    const double dominant = tracked_dominant_root(char_coefficients(p, e), 0.0, 0.18).real();
    CHECK(rate == doctest::Approx(dominant).epsilon(0.05));
}
