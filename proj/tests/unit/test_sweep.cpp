#include "doctest.h"

#include "refugia/errors.hpp"
#include "refugia/linear_stability.hpp"
#include "refugia/sweep.hpp"

#include <cmath>
#include <cstdlib>

using namespace refugia;

namespace {

const ModelParams ref{};

DiagnosticSettings quick()
{
    DiagnosticSettings s;
    s.transient = 300.0;
    s.record = 400.0;
    return s;
}

ScanGrid line(ScanAxisName name, double lo, double hi, int n)
{
    ScanGrid g;
    g.axis1 = {name, lo, hi, n};
    g.fixed = ref;
    g.settings = quick();
    return g;
}

ScanGrid plane(double t1lo, double t1hi, int n1, double t2lo, double t2hi, int n2)
{
    ScanGrid g = line(ScanAxisName::Tau1, t1lo, t1hi, n1);
    g.axis2 = ScanAxis{ScanAxisName::Tau2, t2lo, t2hi, n2};
    return g;
}

bool same(const ScanResult& a, const ScanResult& b)
{
    if (a.rows.size() != b.rows.size())
        return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.axis1_value != y.axis1_value || x.axis2_value != y.axis2_value || x.verdict.label() != y.verdict.label() ||
            x.verdict.peak_values != y.verdict.peak_values ||
            !(x.verdict.lle == y.verdict.lle || (std::isnan(x.verdict.lle) && std::isnan(y.verdict.lle))))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("axis parsing and validation")
{
    CHECK(parse_axis_name("tau1") == ScanAxisName::Tau1);
    CHECK(parse_axis_name("m") == ScanAxisName::Refuge);
    CHECK_THROWS_AS(parse_axis_name("r"), ConfigError);
    CHECK_THROWS_AS((ScanAxis{ScanAxisName::Tau2, 0.3, 0.2, 5}.validate()), ConfigError);
    CHECK_THROWS_AS((ScanAxis{ScanAxisName::Tau2, 0.1, 0.2, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((ScanAxis{ScanAxisName::Refuge, 0.1, 1.0, 3}.validate()), ConfigError);
    CHECK((ScanAxis{ScanAxisName::Tau2, 0.25, 0.7, 10}.value(9)) == doctest::Approx(0.7));
}

TEST_CASE("worker cap from the environment")
{
    setenv("REFUGIA_THREADS", "2", 1);
    CHECK(worker_count(8) == 2);
    CHECK(worker_count(1) == 1);
    setenv("REFUGIA_THREADS", "junk", 1);
    CHECK(worker_count(3) == 3);
    unsetenv("REFUGIA_THREADS");
}

TEST_CASE("bifurcation scan rows and determinism across worker counts")
{
    ScanGrid g = line(ScanAxisName::Tau2, 0.25, 0.45, 6);
    g.fixed.tau1 = 0.5;
    const auto one = bifurcation_scan(g, {1});
    const auto three = bifurcation_scan(g, {3});
    REQUIRE(one.rows.size() == 6);
    CHECK(same(one, three));
    for (int i = 0; i < 6; ++i)
        CHECK(one.rows[i].axis1_value == g.axis1.value(i));
    CHECK(one.rows.front().verdict.label() == "PeriodicN(1)");
    CHECK_FALSE(one.rows.front().verdict.peak_values.empty());

    g.axis2 = ScanAxis{ScanAxisName::Tau1, 0.0, 0.1, 2};
    CHECK_THROWS_AS(bifurcation_scan(g), ConfigError);
}

TEST_CASE("degenerate scan over a stable range")
{
    const auto res = bifurcation_scan(line(ScanAxisName::Tau2, 0.0, 0.1, 2));
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].verdict.kind == AttractorKind::FixedPoint);
    CHECK(res.rows[1].verdict.kind == AttractorKind::FixedPoint);
}

TEST_CASE("continuation keeps one row per point and is reproducible")
{
    ScanGrid g = line(ScanAxisName::Tau2, 0.3, 0.4, 3);
    g.fixed.tau1 = 0.5;
    g.continuation = true;
    const auto a = bifurcation_scan(g, {2});
    const auto b = bifurcation_scan(g, {1});
    CHECK(a.rows.size() == 3);
    CHECK(same(a, b));
}

TEST_CASE("per-point failures are recorded")
{
    const auto res = bifurcation_scan(line(ScanAxisName::Tau1, 1e-4, 0.1, 2));
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].error.has_value());
    CHECK(res.rows[0].verdict.kind == AttractorKind::Undetermined);
    CHECK_FALSE(res.rows[1].error.has_value());
}

TEST_CASE("small delays shrink the step instead of failing")
{
    const auto res = bifurcation_scan(line(ScanAxisName::Tau2, 0.01, 0.02, 2));
    CHECK_FALSE(res.rows[0].error.has_value());
    CHECK(res.rows[0].verdict.kind == AttractorKind::FixedPoint);
}

TEST_CASE("region cells")
{
    const auto base = region_scan(plane(0.0, 0.7, 2, 0.0, 0.8, 2));
    REQUIRE(base.cells.rows.size() == 4);
    CHECK(base.cells.rows[0].verdict.kind == AttractorKind::FixedPoint);
    CHECK(base.cells.rows[3].axis1_value == 0.7);
    CHECK(*base.cells.rows[3].axis2_value == 0.8);
    CHECK(base.cells.rows[3].verdict.kind == AttractorKind::Chaotic);

    const auto osc = region_scan(plane(0.0, 0.1, 2, 0.13, 0.23, 2));
    CHECK(osc.cells.rows[1].verdict.kind != AttractorKind::FixedPoint);

    CHECK_THROWS_AS(region_scan(line(ScanAxisName::Tau1, 0.0, 1.0, 2)), ConfigError);
}

TEST_CASE("region boundary on the gestation axis")
{
    const auto c = char_coefficients(ref, interior_equilibrium(ref));
    const double tau20 = *case2_critical(c).tau_star;
    const auto g = plane(0.0, 0.1, 2, 0.05, 0.35, 16);
    const auto res = region_scan(g, {2});
    int fixed = 0;
    for (const auto& row : res.cells.rows) {
        if (row.axis1_value != 0.0 || row.verdict.kind != AttractorKind::FixedPoint)
            continue;
        ++fixed;
        CHECK(*row.axis2_value < tau20 + g.axis2->spacing());
    }
    CHECK(fixed >= 3);

    bool saw2 = false;
    bool saw4 = false;
    for (const auto& curve : critical_curves(ref, 1.0, 1.0)) {
        if (curve.label == "case2") {
            saw2 = true;
            CHECK(curve.points[0].second == doctest::Approx(tau20));
        }
        if (curve.label == "case4") {
            saw4 = true;
            CHECK(curve.points[0].first == doctest::Approx(0.6166755893340056));
        }
        for (auto [t1, t2] : curve.points)
            CHECK(std::abs(char_eval(c, t1, t2, tracked_dominant_root(c, t1, t2))) < 1e-8);
    }
    CHECK(saw2);
    CHECK(saw4);
}

TEST_CASE("refuge sweep")
{
    ScanGrid g = line(ScanAxisName::Refuge, 0.3, 0.9, 13);
    const auto table = refuge_sweep(g, {}, false);
    REQUIRE(table.critical.size() == 13);
    CHECK(table.scan.rows.empty());
    for (const auto& row : table.critical) {
        if (std::abs(row.m - 0.45) < 1e-12) {
            REQUIRE(row.tau2_0);
            CHECK(*row.tau2_0 == doctest::Approx(0.2176).epsilon(5e-3 / 0.2176));
        }
        CHECK(row.feasible == (row.m < 0.84448991031319412));
        if (!row.feasible)
            CHECK(row.note->find("Infeasible") == 0);
    }
    CHECK(table.tau2_0_trend != Trend::Insufficient);

    ScanGrid edge = line(ScanAxisName::Refuge, 0.8, 0.9, 2);
    const auto run = refuge_sweep(edge);
    REQUIRE(run.scan.rows.size() == 2);
    CHECK_FALSE(run.scan.rows[0].error.has_value());
    REQUIRE(run.scan.rows[1].error.has_value());
    CHECK(run.scan.rows[1].error->find("Infeasible") == 0);
}
