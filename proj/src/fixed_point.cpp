#include "lorenz/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lorenz {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

constexpr double branch_tol = 1e-12;

// |u|^rho for u that must lie in [lo, hi] up to branch_tol.
double power_in(double u, double lo, double hi, double rho, const char* what) {
    if (!(u >= lo - branch_tol && u <= hi + branch_tol))
        fail(ErrorKind::not_renormalizable, std::string(what) + " lands at " + fmt(u) + " outside [" + fmt(lo) +
                                                ", " + fmt(hi) + "]");
    return std::pow(std::abs(std::clamp(u, lo, hi)), rho);
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

IterateResult fixed_point_at(double r, double rho, const FixedPointOptions& opt) {
    return iterate(EpsteinPair::identity(r, rho, opt.degree), opt.iterate_options());
}

}  // namespace

IterateOptions FixedPointOptions::iterate_options() const {
    IterateOptions o;
    o.tol = iterate_tol;
    o.max_iter = max_iter;
    o.strict_class = strict_class;
    o.delta = delta;
    o.epsilon = epsilon;
    return o;
}

GapSample scaling_gap_sample(double r, double rho, const FixedPointOptions& opt) {
    GapSample s;
    s.r = r;
    try {
        const IterateResult it = fixed_point_at(r, rho, opt);
        s.lambda = it.scalings.lambda;
        s.mu = it.scalings.mu;
        s.gap = s.lambda - s.mu;
    } catch (const Error& e) {
        s.lambda = s.mu = s.gap = std::numeric_limits<double>::quiet_NaN();
        s.error = std::string(to_string(e.kind())) + ": " + e.what();
        s.error_kind = e.kind();
    }
    return s;
}

double scaling_gap(double r, double rho, double iterate_tol, int degree) {
    FixedPointOptions opt;
    opt.iterate_tol = iterate_tol;
    opt.degree = degree;
    const IterateResult it = fixed_point_at(r, rho, opt);
    return it.scalings.lambda - it.scalings.mu;
}

double LorenzMapModel::f(double x) const {
    if (!(x >= -1.0 - branch_tol && x <= branch_tol))
        fail(ErrorKind::domain, "f evaluated at " + fmt(x) + " outside [-1, 0]");
    return l_branch(std::pow(std::abs(std::clamp(x, -1.0, 0.0)), rho));
}

double LorenzMapModel::g(double x) const {
    if (!(x >= -branch_tol && x <= r + branch_tol))
        fail(ErrorKind::domain, "g evaluated at " + fmt(x) + " outside [0, r]");
    return t_branch(std::pow(std::clamp(x, 0.0, r), rho));
}

double LorenzMapModel::lambda_from_map() const {
    const double v = f(-1.0);
    if (!(v >= -1.0 - branch_tol && v <= branch_tol))
        fail(ErrorKind::not_renormalizable, "f(-1) = " + fmt(v) + " is not in the left branch");
    return -f(v);
}

LorenzMapModel reconstruct_lorenz(const EpsteinPair& pair, const ScalingState& s) {
    const double r = pair.r, rho = pair.rho;
    const int deg = std::max(pair.U.degree(), pair.V.degree());
    FuncRep l = FuncRep::build([&](double z) { return r - invert_monotone(pair.U, z / s.a); }, Interval(0.0, 1.0), deg);
    FuncRep t = FuncRep::build([&](double z) { return invert_monotone(pair.V, z / s.b) - 1.0; },
                               Interval(0.0, std::pow(r, rho)), deg);
    return {rho, r, s.lambda, s.a, s.b, std::move(l), std::move(t), pair};
}

LorenzMapModel renormalize_map(const LorenzMapModel& m) {
    const double lam = m.lambda_from_map();
    if (!(lam > 0.0 && lam < 1.0)) fail(ErrorKind::not_renormalizable, "rescaling -f(f(-1)) = " + fmt(lam));
    const double lr = std::pow(lam, m.rho);
    // f^(x) = g(f(lam x)) / lam with x = -z^(1/rho), i.e. l^(z) = t(l(lam^rho z)^rho) / lam
    FuncRep l = FuncRep::build(
        [&](double z) { return m.t_branch(power_in(m.l_branch(lr * z), 0.0, m.r, m.rho, "f(lam x)")) / lam; },
        m.l_branch.domain(), m.l_branch.degree());
    // g^(x) = f(f(g(lam x))) / lam
    FuncRep t = FuncRep::build(
        [&](double z) {
            const double u = m.t_branch(lr * z);
            const double v = m.l_branch(power_in(u, -1.0, 0.0, m.rho, "g(lam x)"));
            return m.l_branch(power_in(v, -1.0, 0.0, m.rho, "f(g(lam x))")) / lam;
        },
        m.t_branch.domain(), m.t_branch.degree());
    return {m.rho, m.r, lam, m.a, m.b, std::move(l), std::move(t), std::nullopt};
}

MapResiduals map_residuals(const LorenzMapModel& m, int grid) {
    MapResiduals out;
    const double lam = m.lambda_from_map();
    out.lambda_consistency = std::abs(lam - m.lambda);
    for (double x : Interval(-1.0, 0.0).interior_grid(grid)) {
        const double u = m.f(lam * x);
        if (!(u >= -branch_tol && u <= m.r + branch_tol))
            fail(ErrorKind::not_renormalizable, "f(lam x) = " + fmt(u) + " escapes (0, r] at x=" + fmt(x));
        out.f = std::max(out.f, std::abs(m.g(u) / lam - m.f(x)));
    }
    for (double x : Interval(0.0, m.r).interior_grid(grid)) {
        const double u = m.g(lam * x);
        if (!(u >= -1.0 - branch_tol && u <= branch_tol))
            fail(ErrorKind::not_renormalizable, "g(lam x) = " + fmt(u) + " escapes [-1, 0) at x=" + fmt(x));
        const double v = m.f(u);
        if (!(v >= -1.0 - branch_tol && v <= branch_tol))
            fail(ErrorKind::not_renormalizable, "f(g(lam x)) = " + fmt(v) + " escapes [-1, 0) at x=" + fmt(x));
        out.g = std::max(out.g, std::abs(m.f(v) / lam - m.g(x)));
    }
    return out;
}

bool LorenzDefinitionReport::passes() const {
    return f_increasing && g_increasing && range_ok && (std::isnan(factorization_error) || factorization_error <= 1e-10);
}

LorenzDefinitionReport check_lorenz_definition(const LorenzMapModel& m, int grid) {
    LorenzDefinitionReport rep;
    const auto xf = Interval(-1.0, 0.0).uniform_grid(grid);
    const auto xg = Interval(0.0, m.r).uniform_grid(grid);
    std::vector<double> vf, vg;
    for (double x : xf) vf.push_back(m.f(x));
    for (double x : xg) vg.push_back(m.g(x));
    rep.f_increasing = strictly_increasing(vf);
    rep.g_increasing = strictly_increasing(vg);
    rep.f_max = *std::max_element(vf.begin(), vf.end());
    rep.g_min = *std::min_element(vg.begin(), vg.end());
    const double f_min = *std::min_element(vf.begin(), vf.end());
    const double g_max = *std::max_element(vg.begin(), vg.end());
    rep.range_ok = rep.f_max < m.r + 1e-8 && f_min > -1.0 - 1e-8 && rep.g_min > -1.0 - 1e-8 && g_max < m.r + 1e-8;

    rep.factorization_error = std::numeric_limits<double>::quiet_NaN();
    if (m.source) {
        const EpsteinPair& p = *m.source;
        double worst = 0.0;
        for (std::size_t i = 0; i < xf.size(); ++i) {
            const double direct = m.r - invert_monotone(p.U, std::pow(std::abs(xf[i]), m.rho) / m.a);
            worst = std::max(worst, std::abs(vf[i] - direct));
        }
        for (std::size_t i = 0; i < xg.size(); ++i) {
            const double direct = invert_monotone(p.V, std::pow(xg[i], m.rho) / m.b) - 1.0;
            worst = std::max(worst, std::abs(vg[i] - direct));
        }
        rep.factorization_error = worst;
    }
    return rep;
}

SolveResult assess_pair(const EpsteinPair& pair, const FixedPointOptions& opt) {
    const double r = pair.r, rho = pair.rho;
    const ScalingState s = solve_scalings(pair.U, pair.V, r, rho);
    constexpr double inf = std::numeric_limits<double>::infinity();
    DecoupledResiduals dr{inf, inf};
    try {
        dr = decoupled_residuals(pair, s, 256);
    } catch (const Error&) {
    }

    IterationTrace trace;
    trace.bounds = bounds_sigma_gamma(r, rho, opt.delta, opt.epsilon);
    IterationRecord rec;
    rec.lambda = s.lambda;
    rec.mu = s.mu;
    rec.y = s.y;
    rec.max_N_Z = max_nonlinearity_Z(pair.U, r, rho);
    rec.max_N_W = max_nonlinearity_W(pair.V, r, rho);
    rec.ratio = std::numeric_limits<double>::quiet_NaN();
    rec.brackets_hold = s.brackets_hold();
    trace.records.push_back(rec);

    LorenzMapModel map = reconstruct_lorenz(pair, s);
    MapResiduals mr{inf, inf, inf};
    try {
        mr = map_residuals(map, opt.map_grid);
    } catch (const Error&) {
    }
    return SolveResult{rho,  r,  s.lambda, s.mu, pair, s, std::move(map), {dr.U, dr.V, mr.f, mr.g, mr.lambda_consistency},
                       std::move(trace), {}, 0};
}

std::vector<Check> audit(const SolveResult& s, const FixedPointOptions& opt) {
    std::vector<Check> out;
    auto add = [&](std::string name, bool ok, double value, double limit, bool gating = true) {
        out.push_back({std::move(name), ok, value, limit, gating});
    };

    const double pin = std::max(std::abs(s.pair_star.U(0.0)), std::abs(s.pair_star.V(0.0)));
    bool pair_ok = true;
    try {
        s.pair_star.validate();
    } catch (const Error&) {
        pair_ok = false;
    }
    add("epstein_pair_invariants", pair_ok, pin, 1e-10);

    const auto& recs = s.trace.records;
    const auto breaches = std::count_if(recs.begin(), recs.end(), [](const IterationRecord& r) { return !r.brackets_hold; });
    add("scalings_in_brackets", breaches == 0 && s.scalings.brackets_hold(), static_cast<double>(breaches), 0.0);

    double worst_class = -std::numeric_limits<double>::infinity();
    for (const auto& r : recs)
        worst_class = std::max({worst_class, r.max_N_Z - s.trace.bounds.sigma, r.max_N_W - s.trace.bounds.gamma});
    add("nonlinearity_class", worst_class <= 1e-8, worst_class, 1e-8, opt.strict_class);

    const Interval ju = domain_U(s.r_star, s.rho), jv = domain_V(s.r_star, s.rho);
    const HerglotzReport hu = check_omega(s.pair_star.U, ju), hv = check_omega(s.pair_star.V, jv);
    add("omega_U", hu.passes(), hu.min_schwarzian, -1e-8);
    add("omega_V", hv.passes(), hv.min_schwarzian, -1e-8);
    add("nonlinearity_U_nondecreasing", nonlinearity_nondecreasing(s.pair_star.U), 0.0, 0.0);

    const LorenzDefinitionReport ld = check_lorenz_definition(s.map);
    add("lorenz_map_definition", ld.passes(), ld.factorization_error, 1e-10);

    const double dec = std::max(s.residuals.decoupled_U, s.residuals.decoupled_V);
    add("decoupled_residual", dec <= decoupled_residual_limit, dec, decoupled_residual_limit);
    const double map = std::max(s.residuals.map_f, s.residuals.map_g);
    add("map_residual", map <= map_residual_limit, map, map_residual_limit);
    add("lambda_consistency", s.residuals.lambda_consistency <= lambda_consistency_limit,
        s.residuals.lambda_consistency, lambda_consistency_limit);

    const double gap = std::abs(s.lambda_star - s.mu_star);
    const double gap_limit = opt.tol_r * std::max(s.lambda_star, s.mu_star);
    add("lambda_mu_match", gap <= gap_limit, gap, gap_limit);
    return out;
}

bool gating_checks_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.gating; });
}

SolveResult find_critical_r(double rho, const Interval& bracket, const FixedPointOptions& opt) {
    if (!(opt.tol_r > 0.0)) fail(ErrorKind::usage, "tol_r must be positive");
    if (opt.scan_points < 2) fail(ErrorKind::usage, "scan needs at least 2 points");
    if (!(bracket.lo > 0.0)) fail(ErrorKind::usage, "bracket must lie in r > 0");

    std::vector<GapSample> scan;
    for (double r : bracket.uniform_grid(opt.scan_points)) scan.push_back(scaling_gap_sample(r, rho, opt));

    int hit = -1;
    for (std::size_t i = 0; i + 1 < scan.size() && hit < 0; ++i) {
        const double g0 = scan[i].gap, g1 = scan[i + 1].gap;
        if (std::isfinite(g0) && std::isfinite(g1) && ((g0 <= 0.0 && g1 > 0.0) || (g0 >= 0.0 && g1 < 0.0)))
            hit = static_cast<int>(i);
    }
    if (hit < 0 && std::all_of(scan.begin(), scan.end(), [](const GapSample& g) { return g.error_kind.has_value(); }))
        fail(*scan.front().error_kind, "every scan point failed; at r=" + fmt(scan.front().r) + ": " + scan.front().error);
    if (hit < 0) {
        std::ostringstream os;
        os << "lambda - mu has no sign change on [" << fmt(bracket.lo) << ", " << fmt(bracket.hi) << "] for rho=" << fmt(rho)
           << "; sampled gaps:";
        for (const auto& s : scan) {
            os << " r=" << fmt(s.r) << ":";
            if (s.error.empty()) os << fmt(s.gap);
            else os << "error(" << s.error << ")";
        }
        fail(ErrorKind::bracket, os.str());
    }

    double lo = scan[hit].r, hi = scan[hit + 1].r;
    const bool rising = scan[hit].gap <= 0.0;
    std::optional<IterateResult> best;
    double r_star = lo;
    int steps = 0;
    if (scan[hit].gap == 0.0) {
        best = fixed_point_at(lo, rho, opt);
    } else {
        for (;; ++steps) {
            if (steps >= opt.max_bisections)
                fail(ErrorKind::convergence, "r bisection did not meet tol_r " + fmt(opt.tol_r) + " within " +
                                                 std::to_string(opt.max_bisections) + " steps; bracket [" +
                                                 fmt(lo) + ", " + fmt(hi) + "]");
            const double mid = 0.5 * (lo + hi);
            IterateResult it = fixed_point_at(mid, rho, opt);
            const double gap = it.scalings.lambda - it.scalings.mu;
            const double scale = std::max(it.scalings.lambda, it.scalings.mu);
            const bool stuck = mid == lo || mid == hi;  // adjacent doubles
            if ((gap < 0.0) == rising) lo = mid;
            else hi = mid;
            if ((std::abs(gap) <= opt.tol_r * scale && hi - lo <= opt.tol_r) || gap == 0.0 || stuck) {
                r_star = mid;
                best = std::move(it);
                ++steps;
                break;
            }
        }
    }
    if (scan[hit].gap == 0.0) r_star = lo;

    IterateResult& it = *best;
    LorenzMapModel map = reconstruct_lorenz(it.pair, it.scalings);
    const MapResiduals mr = map_residuals(map, opt.map_grid);
    SolveResiduals res{it.residuals.U, it.residuals.V, mr.f, mr.g, mr.lambda_consistency};
    return SolveResult{rho,
                       r_star,
                       it.scalings.lambda,
                       it.scalings.mu,
                       it.pair,
                       it.scalings,
                       std::move(map),
                       res,
                       std::move(it.trace),
                       std::move(scan),
                       steps};
}

}  // namespace lorenz
