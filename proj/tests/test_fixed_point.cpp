#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "lorenz/errors.hpp"
#include "lorenz/fixed_point.hpp"

using namespace lorenz;

namespace {

const SolveResult& rho2() {
    static const SolveResult s = find_critical_r(2.0, Interval(0.1, 1.2));
    return s;
}

}  // namespace

TEST_CASE("gap signs at rho = 2") {
    CHECK(scaling_gap(0.2, 2.0) < 0.0);
    CHECK(scaling_gap(1.2, 2.0) > 0.0);
    CHECK(std::abs(scaling_gap(0.4531118891, 2.0)) < 1e-8);
}

TEST_CASE("gap sample records failures instead of throwing") {
    FixedPointOptions o;
    o.max_iter = 1;
    const GapSample g = scaling_gap_sample(0.5, 2.0, o);
    CHECK(std::isnan(g.gap));
    REQUIRE(g.error_kind.has_value());
    CHECK(*g.error_kind == ErrorKind::convergence);
    CHECK(g.error.find("convergence") == 0);
}

TEST_CASE("critical r at rho = 2") {
    const auto& s = rho2();
    CHECK(std::abs(s.r_star - 0.453) <= 1e-3);
    CHECK(std::abs(s.lambda_star - s.mu_star) <= 1e-8 * s.lambda_star);
    CHECK(s.lambda_star > s.scalings.lambda_lo);
    CHECK(s.lambda_star < s.scalings.lambda_hi);
    CHECK(s.scan.size() == 16);
    CHECK(s.residuals.decoupled_U <= 1e-9);
    CHECK(s.residuals.decoupled_V <= 1e-9);
    CHECK(s.residuals.map_f <= 1e-6);
    CHECK(s.residuals.map_g <= 1e-6);
    // map-level and decoupled residuals within 1e3 iterate tolerances
    CHECK(std::max(s.residuals.map_f, s.residuals.map_g) <= 1e3 * 1e-12 * 1e4);
}

TEST_CASE("bracket without a crossing") {
    FixedPointOptions o;
    try {
        find_critical_r(2.0, Interval(1.0, 1.2), o);
        FAIL("expected a bracket error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::bracket);
        CHECK(std::string(e.what()).find("sampled gaps") != std::string::npos);
    }
}

TEST_CASE("reconstructed Lorenz map endpoints") {
    const auto& s = rho2();
    const auto& m = s.map;
    CHECK(m.f(0.0) == doctest::Approx(s.r_star).epsilon(1e-12));
    CHECK(m.g(0.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(m.f(-1.0) == doctest::Approx(-s.scalings.y).epsilon(1e-12));
    CHECK(m.g(s.r_star) == doctest::Approx(s.lambda_star * s.r_star).epsilon(1e-10));
    CHECK(std::abs(m.lambda_from_map() - s.lambda_star) <= 1e-8);
    CHECK(std::abs(m.f(-0.3) - m.l_branch(std::pow(0.3, 2.0))) < 1e-15);
}

TEST_CASE("renormalizing the fixed point returns it") {
    const auto& m = rho2().map;
    const LorenzMapModel n = renormalize_map(m);
    CHECK(n.lambda > 0.0);
    CHECK(n.lambda < 1.0);
    double df = 0.0, dg = 0.0;
    for (double x : Interval(-1.0, 0.0).interior_grid(200)) df = std::max(df, std::abs(n.f(x) - m.f(x)));
    for (double x : Interval(0.0, m.r).interior_grid(200)) dg = std::max(dg, std::abs(n.g(x) - m.g(x)));
    CHECK(df <= 1e-6);
    CHECK(dg <= 1e-6);
    CHECK(n.f(-1.0) == doctest::Approx(m.f(-1.0)).epsilon(1e-6));
}

TEST_CASE("a map that is not renormalizable") {
    LorenzMapModel m = rho2().map;
    // push f(-lambda) below zero so f(lambda x) leaves the right branch's domain
    m.l_branch = FuncRep::build([&](double z) { return rho2().map.l_branch(z) - 0.5; }, m.l_branch.domain(), 32);
    try {
        renormalize_map(m);
        FAIL("expected not-renormalizable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_renormalizable);
    }
}

TEST_CASE("Lorenz map definition checks") {
    const auto rep = check_lorenz_definition(rho2().map);
    CHECK(rep.f_increasing);
    CHECK(rep.g_increasing);
    CHECK(rep.range_ok);
    CHECK(rep.f_max < rho2().r_star + 1e-8);
    CHECK(rep.g_min > -1.0 - 1e-8);
    CHECK(rep.factorization_error <= 1e-10);
    CHECK(rep.passes());

    // an increasing l turns f decreasing
    LorenzMapModel bad = rho2().map;
    bad.l_branch = FuncRep::build([](double z) { return -1.0 + z; }, bad.l_branch.domain(), 16);
    bad.source.reset();
    const auto rb = check_lorenz_definition(bad);
    CHECK_FALSE(rb.f_increasing);
    CHECK(std::isnan(rb.factorization_error));
    CHECK_FALSE(rb.passes());
}

TEST_CASE("assessing a stored pair reproduces the solve") {
    const auto& s = rho2();
    const SolveResult a = assess_pair(s.pair_star);
    CHECK(a.lambda_star == doctest::Approx(s.lambda_star).epsilon(1e-14));
    CHECK(a.trace.records.size() == 1);
    CHECK(a.residuals.map_f == doctest::Approx(s.residuals.map_f).epsilon(1e-3));
    const auto checks = audit(a);
    CHECK(gating_checks_pass(checks));
}

TEST_CASE("audit of the rho = 2 solve") {
    const auto checks = audit(rho2());
    CHECK(gating_checks_pass(checks));
    bool saw_class = false;
    for (const auto& c : checks) {
        CAPTURE(c.name);
        if (c.name == "nonlinearity_class") {
            saw_class = true;
            CHECK_FALSE(c.gating);
        } else {
            CHECK(c.passed);
        }
    }
    CHECK(saw_class);
    FixedPointOptions strict;
    strict.strict_class = true;
    const auto sc = audit(rho2(), strict);
    CHECK(std::any_of(sc.begin(), sc.end(), [](const Check& c) { return c.name == "nonlinearity_class" && c.gating; }));
}

TEST_CASE("r_star is stable under degree refinement") {
    FixedPointOptions o;
    o.degree = 96;
    const SolveResult fine = find_critical_r(2.0, Interval(0.1, 1.2), o);
    CHECK(std::abs(fine.r_star - rho2().r_star) <= 1e-6);
}

// Crossing sign pattern: negative at the low end, positive at the high end.
TEST_CASE("gap sign pattern rho = 1.5") {
    CHECK(scaling_gap(0.15, 1.5) < 0.0);
    CHECK(scaling_gap(1.2, 1.5) > 0.0);
}

TEST_CASE("gap sign pattern rho = 3") {
    CHECK(scaling_gap(0.15, 3.0) < 0.0);
    CHECK(scaling_gap(1.2, 3.0) > 0.0);
}

TEST_CASE("gap sign pattern rho = 5") {
    CHECK(scaling_gap(0.15, 5.0) < 0.0);
    CHECK(scaling_gap(1.2, 5.0) > 0.0);
}
