// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lorenz/cli.hpp"

using namespace lorenz;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Shared rho = 2 solve through the command-line path.
struct AnchorRun {
    SolveResult solve;
    double wall = 0.0;
    int exit_code = 0;
    double stored_r = 0.0;
};

const AnchorRun& anchor() {
    static const AnchorRun run = [] {
        const fs::path dir = fs::temp_directory_path() / "lorenz_fp_acceptance";
        fs::remove_all(dir);
        cli::RunConfig cfg;
        cfg.rho = 2.0;
        cfg.output_dir = dir;
        const auto t0 = clock_type::now();
        const int code = cli::cmd_solve(cfg);
        const double wall = seconds_since(t0);
        std::ifstream in(dir / "result.json");
        std::ostringstream text;
        text << in.rdbuf();
        const auto stored = cli::parse_result(text.str());
        // Full in-memory result for the remaining criteria, same config.
        SolveResult s = find_critical_r(2.0, Interval(cfg.bracket_lo, cfg.bracket_hi), cfg.options());
        return AnchorRun{std::move(s), wall, code, stored.r_star};
    }();
    return run;
}

Outcome criterion_1() {
    const auto& a = anchor();
    const bool ok = a.exit_code == 0 && std::abs(a.stored_r - 0.453) <= 1e-3 && a.wall <= 60.0;
    return {ok, "r_star=" + num(a.stored_r) + " exit=" + std::to_string(a.exit_code) + " wall=" + num(a.wall) + "s"};
}

Outcome criterion_2() {
    const auto& r = anchor().solve.residuals;
    const bool ok = r.decoupled_U <= 1e-9 && r.decoupled_V <= 1e-9;
    return {ok, "U " + num(r.decoupled_U) + ", V " + num(r.decoupled_V) + " (limit 1e-9)"};
}

Outcome criterion_3() {
    const auto& s = anchor().solve;
    const MapResiduals m = map_residuals(s.map, 200);
    const bool ok = m.f <= 1e-6 && m.g <= 1e-6 && m.lambda_consistency <= 1e-8;
    return {ok, "f " + num(m.f) + ", g " + num(m.g) + ", |lambda(eq) - lambda*| " + num(m.lambda_consistency)};
}

Outcome criterion_4() {
    const double r = 0.453, rho = 2.0;
    const IterateResult run = iterate(EpsteinPair::identity(r, rho, 64));
    const auto& b = run.trace.bounds;
    int bracket_bad = 0, class_bad = 0;
    double worst_z = -INFINITY, worst_w = -INFINITY;
    for (const auto& rec : run.trace.records) {
        const ScalingState probe{rec.lambda, rec.mu, rec.y, 0, 0, lambda_minus(r, rho), lambda_plus(r, rho),
                                 mu_minus(r, rho), mu_plus(r, rho), 0};
        if (!probe.brackets_hold()) ++bracket_bad;
        if (rec.max_N_Z > b.sigma + 1e-8 || rec.max_N_W > b.gamma + 1e-8) ++class_bad;
        worst_z = std::max(worst_z, rec.max_N_Z);
        worst_w = std::max(worst_w, rec.max_N_W);
    }
    const int n = static_cast<int>(run.trace.records.size());
    return {bracket_bad == 0 && class_bad == 0,
            std::to_string(n) + " iterates; bracket breaches " + std::to_string(bracket_bad) + "; class breaches " +
                std::to_string(class_bad) + " (max N_Z " + num(worst_z) + " vs Sigma " + num(b.sigma) + ", max N_W " +
                num(worst_w) + " vs Gamma " + num(b.gamma) + ")"};
}

Outcome criterion_5() {
    bool ok = true;
    std::string detail;
    for (double rho : {1.5, 2.0, 3.0, 5.0}) {
        double lo = NAN, hi = NAN, slowest = 0.0;
        std::string err;
        for (double r : {0.15, 1.2}) {
            const auto t0 = clock_type::now();
            try {
                (r < 1.0 ? lo : hi) = scaling_gap(r, rho);
            } catch (const Error& e) {
                err = e.what();
            }
            slowest = std::max(slowest, seconds_since(t0));
        }
        const bool cell = lo < 0.0 && hi > 0.0 && slowest <= 30.0;
        ok = ok && cell;
        detail += "rho=" + num(rho) + ": gap(0.15)=" + num(lo) + " gap(1.2)=" + num(hi) + (cell ? "" : " [breach]") +
                  (err.empty() ? "" : " error: " + err) + "; ";
    }
    return {ok, detail};
}

// Independent oracles for the identity seeds at r = 0.5, rho = 2, in long double.
long double cubic_root_y(long double r, long double mu) {
    long double lo = mu, hi = 1.0L;
    for (int i = 0; i < 200; ++i) {
        const long double m = 0.5L * (lo + hi);
        ((m * m * (r + m) - (r + mu)) < 0 ? lo : hi) = m;
    }
    return 0.5L * (lo + hi);
}

long double nested_mu(long double r) {
    // mu = Z'(y) Z'(mu) with Z(x) = sqrt((r + x) / (r + y)): mu = y / (4 (r + y)(r + mu))
    auto g = [&](long double mu) {
        const long double y = cubic_root_y(r, mu);
        return mu - y / (4.0L * (r + y) * (r + mu));
    };
    long double lo = 1e-6L, hi = 0.999L;
    for (int i = 0; i < 200; ++i) {
        const long double m = 0.5L * (lo + hi);
        (g(m) < 0 ? lo : hi) = m;
    }
    return 0.5L * (lo + hi);
}

Outcome criterion_6() {
    const double r = 0.5, rho = 2.0;
    const auto p = EpsteinPair::identity(r, rho, 64);
    const double lam = solve_lambda(p.V, r, rho);
    const double lam_exact = (std::sqrt(6.0) - 2.0) / 2.0;  // lambda^2 r + lambda - r/2 = 0
    const double y = solve_y(p.U, r, 0.3, rho);
    const double y_oracle = static_cast<double>(cubic_root_y(0.5L, 0.3L));
    const double mu = solve_mu(p.U, r, rho).mu;
    const double mu_oracle = static_cast<double>(nested_mu(0.5L));
    const double el = std::abs(lam - lam_exact), ey = std::abs(y - y_oracle), em = std::abs(mu - mu_oracle);
    return {el <= 1e-10 && ey <= 1e-10 && em <= 1e-8,
            "lambda " + num(lam) + " err " + num(el) + "; y " + num(y) + " err " + num(ey) + "; mu " + num(mu) +
                " err " + num(em)};
}

Outcome criterion_7() {
    const auto& s = anchor().solve;
    const auto hu = check_omega(s.pair_star.U, domain_U(s.r_star, s.rho));
    const auto hv = check_omega(s.pair_star.V, domain_V(s.r_star, s.rho));
    const bool mono = nonlinearity_nondecreasing(s.pair_star.U);
    const bool ok = hu.passes() && hv.passes() && hu.min_first_derivative > 0 && hv.min_first_derivative > 0 &&
                    hu.min_schwarzian >= -1e-8 && hv.min_schwarzian >= -1e-8 && mono;
    return {ok, "U: min S " + num(hu.min_schwarzian) + ", min U' " + num(hu.min_first_derivative) + "; V: min S " +
                    num(hv.min_schwarzian) + ", min V' " + num(hv.min_first_derivative) +
                    "; N_U nondecreasing " + (mono ? "yes" : "no")};
}

Outcome criterion_8() {
    const auto& recs = anchor().solve.trace.records;
    bool ok = recs.size() <= 200;
    double worst = 0.0;
    for (std::size_t n = 5; n < recs.size(); ++n) {
        worst = std::max(worst, recs[n].ratio);
        ok = ok && recs[n].ratio < 1.0;
    }
    const auto& last = recs.back();
    const double d = std::max(last.sup_diff_U, last.sup_diff_V);
    ok = ok && d <= 1e-12;
    return {ok, std::to_string(recs.size()) + " iterates, final sup diff " + num(d) + ", max ratio from n=5 " + num(worst)};
}

Outcome criterion_9() {
    bool ok = true;
    std::string detail;
    for (double rho : {2.0, 3.0}) {
        FixedPointOptions coarse, fine;
        fine.degree = 96;
        const Interval br(working_r_lo, working_r_hi);
        const double a = find_critical_r(rho, br, coarse).r_star;
        const double b = find_critical_r(rho, br, fine).r_star;
        ok = ok && std::abs(a - b) <= 1e-6;
        detail += "rho=" + num(rho) + ": |r64 - r96| = " + num(std::abs(a - b)) + "; ";
    }
    return {ok, detail};
}

Outcome criterion_10() {
    bool ok = true;
    std::string detail;
    for (double rho : {1.2, 1.5, 2.0, 3.0, 5.0, 8.0}) {
        try {
            const FixedPointOptions opt;
            const SolveResult s = find_critical_r(rho, Interval(working_r_lo, working_r_hi), opt);
            const auto checks = audit(s, opt);
            std::string breached;
            for (const auto& c : checks)
                if (!c.passed && c.gating) breached += " " + c.name;
            const bool green = gating_checks_pass(checks);
            ok = ok && green;
            detail += "rho=" + num(rho) + ": r_star " + num(s.r_star) + (green ? " green" : " breached:" + breached) + "; ";
        } catch (const Error& e) {
            ok = false;
            detail += "rho=" + num(rho) + ": " + to_string(e.kind()) + " error; ";
        }
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                         criterion_5, criterion_6, criterion_7, criterion_8,
                                                         criterion_9, criterion_10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("unexpected error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass" << std::endl;
    return failed == 0 ? 0 : 1;
}
