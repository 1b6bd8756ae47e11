#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lorenz/errors.hpp"
#include "lorenz/renorm_op.hpp"

using namespace lorenz;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no lorenz::Error thrown");
    return ErrorKind::usage;
}

constexpr double r_anchor = 0.4531118891;

// Converged pair near the rho = 2 fixed point, shared by several cases.
const IterateResult& anchor_run() {
    static const IterateResult run = iterate(EpsteinPair::identity(r_anchor, 2.0, 64));
    return run;
}

template <class M>
double fd1(const M& m, double z, double h = 1e-5) {
    return (m(z + h) - m(z - h)) / (2 * h);
}

}  // namespace

TEST_CASE("domains at r = 0.5") {
    const double lp = std::sqrt(1.0 / 3.0), mp = 2.0 / 3.0;
    const Interval ju = domain_U(0.5, 2.0), jv = domain_V(0.5, 2.0);
    CHECK(ju.lo == doctest::Approx(0.5 - 0.5 / (lp * mp)));
    CHECK(ju.hi == doctest::Approx(0.5 + 1.0 / lp));
    CHECK(jv.lo == doctest::Approx(1.0 - 1.0 / (lp * std::sqrt(mp))));
    CHECK(jv.hi == doctest::Approx(1.0 + 0.5 / mp));
    CHECK(domain_Z(0.5, 2.0).lo == -0.5);
    CHECK(domain_W(0.5, 2.0).lo == -1.0);
    CHECK(ju.contains(0.0));
    CHECK(jv.contains(0.0));
}

TEST_CASE("Z on the identity seed") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 64);
    const double y = 0.788084542335849;
    const RootMap Z = make_Z(p.U, 0.5, y, 2.0);
    CHECK(std::abs(Z(y) - 1.0) < 1e-10);
    CHECK(Z(-0.5) == 0.0);
    CHECK(std::abs(Z(0.3) - y) < 1e-10);
    CHECK(Z(0.1) == doctest::Approx(std::sqrt(0.6 / (0.5 + y))).epsilon(1e-13));
    CHECK(Z.deriv(0.1) == doctest::Approx(fd1(Z, 0.1)).epsilon(1e-8));
    CHECK(Z.nonlinearity(0.1) == doctest::Approx(-0.5 / 0.6).epsilon(1e-12));
    CHECK(Z.deriv2(0.1) / Z.deriv(0.1) == doctest::Approx(Z.nonlinearity(0.1)).epsilon(1e-12));
}

TEST_CASE("W on the identity seed") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 64);
    const double lambda = 0.224744871391589;
    const RootMap W = make_W(p.V, 0.5, lambda, 2.0);
    CHECK(std::abs(W(lambda * 0.5) - 1.0) < 1e-10);
    CHECK(W(-1.0) == 0.0);
    for (double x : W.domain().interior_grid(50)) CHECK(W.nonlinearity(x) == doctest::Approx(-0.5 / (x + 1.0)).epsilon(1e-11));
}

TEST_CASE("negative root argument is a branch error") {
    const Interval ju = domain_U(0.5, 2.0);
    // U(0) = 0 but U < 0 on (0, 0.2)
    const auto U = FuncRep::build([](double x) { return x * (x - 0.2); }, ju, 32);
    const RootMap Z = make_Z(U, 0.5, 0.7, 2.0);
    CHECK(kind_of([&] { Z(-0.4); }) == ErrorKind::branch);
    CHECK(Z(-0.5) == 0.0);
}

TEST_CASE("Psi on the identity seed") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 64);
    const double lambda = solve_lambda(p.V, 0.5, 2.0);
    const PsiMap psi = make_Psi(p.V, lambda, 0.5, 2.0);
    CHECK(std::abs(psi(0.0)) < 1e-10);
    CHECK(std::abs(psi.deriv(0.0) - 0.0505102572168219) < 1e-10);
    CHECK(psi(0.5 + 1.0 / lambda) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(psi.deriv(0.3) == doctest::Approx(fd1(psi, 0.3)).epsilon(1e-8));
    CHECK(psi.deriv2(0.3) == doctest::Approx(fd1([&](double z) { return psi.deriv(z); }, 0.3)).epsilon(1e-7));
    CHECK(kind_of([&] { psi(50.0); }) == ErrorKind::composition);
    for (double z : domain_U(0.5, 2.0).interior_grid(100)) CHECK(psi.nonlinearity(z) > 0.0);
}

TEST_CASE("Phi on the identity seed") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 64);
    const MuSolution m = solve_mu(p.U, 0.5, 2.0);
    const PhiMap phi = make_Phi(p.U, m.mu, m.y, 0.5, 2.0);
    CHECK(std::abs(phi(0.0)) < 1e-10);
    CHECK(std::abs(phi.deriv(0.0) - m.mu * m.mu) < 1e-10);
    CHECK(std::abs(phi.deriv(0.0) - 0.0446329249011158) < 1e-8);
    // 1 - Z(0) with Z(0) = sqrt(r / (r + y)), mpmath oracle
    CHECK(std::abs(phi(1.0 + 0.5 / m.mu) - 0.368384465363754) < 1e-9);
    CHECK(phi.deriv(-0.5) == doctest::Approx(fd1(phi, -0.5)).epsilon(1e-8));
    CHECK(phi.deriv2(-0.5) == doctest::Approx(fd1([&](double z) { return phi.deriv(z); }, -0.5)).epsilon(1e-7));
    CHECK(phi.nonlinearity(-0.5) == doctest::Approx(phi.deriv2(-0.5) / phi.deriv(-0.5)).epsilon(1e-11));
    for (double z : domain_V(0.5, 2.0).interior_grid(100)) CHECK(phi.nonlinearity(z) > 0.0);
    CHECK(kind_of([&] { phi(-50.0); }) == ErrorKind::composition);
}

TEST_CASE("one step from identity seeds keeps the normalization") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 64);
    const StepResult s = apply_T(p);
    CHECK(std::abs(s.next.U(0.0)) < 1e-14);
    CHECK(std::abs(s.next.V(0.0)) < 1e-14);
    CHECK(std::abs(s.next.U.derivative(1)(0.0) - 1.0) < 1e-9);
    CHECK(std::abs(s.next.V.derivative(1)(0.0) - 1.0) < 1e-9);
    CHECK(s.scalings.lambda == doctest::Approx(0.224744871391589).epsilon(1e-12));
    CHECK(s.scalings.brackets_hold());
    CHECK_NOTHROW(s.next.validate());
    CHECK(check_omega(s.next.U, domain_U(0.5, 2.0)).passes());
    CHECK(check_omega(s.next.V, domain_V(0.5, 2.0)).passes());
}

TEST_CASE("normalization holds after every step") {
    EpsteinPair p = EpsteinPair::identity(r_anchor, 2.0, 64);
    for (int n = 0; n < 6; ++n) {
        const StepResult s = apply_T(p);
        const PsiMap psi = make_Psi(p.V, s.scalings.lambda, p.r, p.rho);
        const PhiMap phi = make_Phi(p.U, s.scalings.mu, s.scalings.y, p.r, p.rho);
        CHECK(std::abs(psi(0.0)) < 1e-9);
        CHECK(std::abs(phi(0.0)) < 1e-9);
        CHECK(std::abs(psi.deriv(0.0) - std::pow(s.scalings.lambda, 2.0)) < 1e-9);
        CHECK(std::abs(phi.deriv(0.0) - std::pow(s.scalings.mu, 2.0)) < 1e-9);
        CHECK(std::abs(s.next.U(0.0)) < 1e-9);
        CHECK(std::abs(s.next.U.derivative(1)(0.0) - p.U.derivative(1)(0.0)) < 1e-9);
        CHECK(std::abs(s.next.V.derivative(1)(0.0) - p.V.derivative(1)(0.0)) < 1e-9);
        p = s.next;
    }
}

TEST_CASE("pair validation") {
    auto p = EpsteinPair::identity(0.5, 2.0, 32);
    p.r = 0.6;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::invariant);
    auto q = EpsteinPair::identity(0.5, 2.0, 32);
    q.U = FuncRep::build([](double x) { return x + 1e-6; }, q.U.domain(), 32);
    CHECK(kind_of([&] { q.validate(); }) == ErrorKind::invariant);
}

TEST_CASE("iteration converges at the rho = 2 anchor") {
    const auto& run = anchor_run();
    CHECK(run.trace.records.size() <= 200);
    const auto& last = run.trace.records.back();
    CHECK(std::max(last.sup_diff_U, last.sup_diff_V) <= 1e-12);
    CHECK(run.residuals.U <= 1e-11);
    CHECK(run.residuals.V <= 1e-11);
    CHECK(std::abs(run.scalings.lambda - run.scalings.mu) < 1e-8);
    CHECK(run.trace.brackets_hold());
    // re-applying T moves the fixed point by at most 10 tol
    const StepResult again = apply_T(run.pair);
    CHECK(sup_diff(again.next.U, run.pair.U, 256) <= 1e-11);
    CHECK(sup_diff(again.next.V, run.pair.V, 256) <= 1e-11);
    CHECK(std::abs(again.scalings.lambda - run.scalings.lambda) < 1e-10);
}

TEST_CASE("a converged pair needs a single iterate") {
    const auto again = iterate(anchor_run().pair);
    REQUIRE(again.trace.records.size() == 1);
    CHECK(std::max(again.trace.records[0].sup_diff_U, again.trace.records[0].sup_diff_V) <= 1e-12);
}

TEST_CASE("iterating from T(pair) reaches the same fixed point") {
    const auto p0 = EpsteinPair::identity(r_anchor, 2.0, 64);
    const auto from_step = iterate(apply_T(p0).next);
    CHECK(sup_diff(from_step.pair.U, anchor_run().pair.U, 256) < 1e-11);
    CHECK(sup_diff(from_step.pair.V, anchor_run().pair.V, 256) < 1e-11);
    CHECK(from_step.trace.records.size() + 1 == anchor_run().trace.records.size());
}

TEST_CASE("fixed-point pair stays in the Herglotz real-slice class") {
    const auto& run = anchor_run();
    CHECK(check_omega(run.pair.U, domain_U(r_anchor, 2.0)).passes());
    CHECK(check_omega(run.pair.V, domain_V(r_anchor, 2.0)).passes());
}

TEST_CASE("sup-diff ratios settle below one") {
    const auto& recs = anchor_run().trace.records;
    CHECK(std::isnan(recs[0].ratio));
    for (std::size_t n = 5; n < recs.size(); ++n) {
        CAPTURE(n);
        CHECK(recs[n].ratio < 1.0);
        CHECK(recs[n].ratio <= recs[n - 1].ratio + 0.05);
    }
}

TEST_CASE("iteration cap") {
    const auto p = EpsteinPair::identity(0.5, 2.0, 32);
    IterateOptions o;
    o.max_iter = 0;
    try {
        iterate(p, o);
        FAIL("expected non-convergence");
    } catch (const ConvergenceError& e) {
        CHECK(e.kind() == ErrorKind::convergence);
        CHECK(e.trace().records.empty());
    }
    o.max_iter = 3;
    try {
        iterate(p, o);
        FAIL("expected non-convergence");
    } catch (const ConvergenceError& e) {
        CHECK(e.trace().records.size() == 3);
    }
}

TEST_CASE("strict class monitoring stops at the first breach") {
    IterateOptions o;
    o.strict_class = true;
    CHECK(kind_of([&] { iterate(EpsteinPair::identity(0.5, 2.0, 32), o); }) == ErrorKind::invariant);
}
