#include "lorenz/renorm_op.hpp"

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

constexpr double root_clamp = 1e-12;
constexpr double compose_tol = 1e-10;

// Map t into dom, allowing an overshoot of compose_tol * max(1, width).
double enter(const Interval& dom, double t, const char* what) {
    const double tol = compose_tol * std::max(1.0, dom.width());
    if (!dom.contains(t, tol))
        fail(ErrorKind::composition, std::string(what) + " argument " + fmt(t) + " escapes [" + fmt(dom.lo) +
                                         ", " + fmt(dom.hi) + "]");
    return std::clamp(t, dom.lo, dom.hi);
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

Interval domain_U(double r, double rho) {
    const double lp = lambda_plus(r, rho), mp = mu_plus(r, rho);
    return {r - r / (lp * mp), r + 1.0 / lp};
}

Interval domain_V(double r, double rho) {
    const double lp = lambda_plus(r, rho), mp = mu_plus(r, rho);
    return {1.0 - 1.0 / (lp * std::sqrt(mp)), 1.0 + r / mp};
}

Interval domain_Z(double r, double rho) { return {-r, 1.0 / lambda_plus(r, rho)}; }

Interval domain_W(double r, double rho) { return {-1.0, r / mu_plus(r, rho)}; }

Interval domain_Psi(double r, double lambda, double rho) {
    return {r - r / (lambda * mu_plus(r, rho)), r + 1.0 / lambda};
}

Interval domain_Phi(double r, double mu, double y, double rho) {
    return {1.0 - y / (mu * lambda_plus(r, rho)), 1.0 + r / mu};
}

EpsteinPair EpsteinPair::identity(double r, double rho, int degree) {
    return {FuncRep::identity(domain_U(r, rho), degree), FuncRep::identity(domain_V(r, rho), degree), r, rho};
}

void EpsteinPair::validate() const {
    const Interval ju = domain_U(r, rho), jv = domain_V(r, rho);
    if (!same(U.domain().lo, ju.lo) || !same(U.domain().hi, ju.hi))
        fail(ErrorKind::invariant, "U is not defined on J_U for r=" + fmt(r));
    if (!same(V.domain().lo, jv.lo) || !same(V.domain().hi, jv.hi))
        fail(ErrorKind::invariant, "V is not defined on J_V for r=" + fmt(r));
    if (std::abs(U(0.0)) > 1e-10) fail(ErrorKind::invariant, "U(0) = " + fmt(U(0.0)));
    if (std::abs(V(0.0)) > 1e-10) fail(ErrorKind::invariant, "V(0) = " + fmt(V(0.0)));
    auto increasing = [](std::span<const double> s) { return std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end(); };
    if (!increasing(U.samples())) fail(ErrorKind::invariant, "U is not increasing on its nodes");
    if (!increasing(V.samples())) fail(ErrorKind::invariant, "V is not increasing on its nodes");
}

RootMap::RootMap(const FuncRep& F, double shift, double anchor, double rho, const Interval& domain)
    : f_(F), d1_(F.derivative(1)), d2_(F.derivative(2)), shift_(shift), f0_(F(0.0)), norm_(F(anchor) - f0_), rho_(rho),
      domain_(domain) {
    if (!(norm_ > 0.0)) fail(ErrorKind::domain, "root map normalizer F(" + fmt(anchor) + ") = " + fmt(norm_));
}

double RootMap::base(double x) const {
    const double v = f_(shift_ + x) - f0_;
    if (v < 0.0) {
        if (v / norm_ < -root_clamp)
            fail(ErrorKind::branch, "negative argument " + fmt(v / norm_) + " to the real root at x=" + fmt(x));
        return 0.0;
    }
    return v;
}

double RootMap::value(double x) const { return std::pow(base(x) / norm_, 1.0 / rho_); }

double RootMap::deriv(double x) const {
    const double v = base(x);
    if (v == 0.0) return std::numeric_limits<double>::infinity();
    return value(x) * d1_(shift_ + x) / (rho_ * v);
}

double RootMap::deriv2(double x) const {
    const double v = base(x);
    if (v == 0.0) return -std::numeric_limits<double>::infinity();
    const double p1 = d1_(shift_ + x) / v, p2 = d2_(shift_ + x) / v;
    const double k = 1.0 / rho_;
    return value(x) * (k * p2 + k * (k - 1.0) * p1 * p1);
}

double RootMap::nonlinearity(double x) const {
    const double v = base(x);
    const double p1 = d1_(shift_ + x);
    if (std::abs(p1) < 1e-300) fail(ErrorKind::singular, "vanishing derivative at x=" + fmt(x));
    return d2_(shift_ + x) / p1 + (1.0 / rho_ - 1.0) * p1 / v;
}

RootMap make_Z(const FuncRep& U, double r, double y, double rho) {
    return RootMap(U, r, r + y, rho, domain_Z(r, rho));
}

RootMap make_W(const FuncRep& V, double r, double lambda, double rho) {
    return RootMap(V, 1.0, lambda * r + 1.0, rho, domain_W(r, rho));
}

PsiMap::PsiMap(RootMap W, double r, double lambda, double rho)
    : W_(std::move(W)), r_(r), lambda_(lambda), domain_(domain_Psi(r, lambda, rho)) {}

double PsiMap::arg(double z) const { return enter(W_.domain(), lambda_ * (r_ - z), "Psi"); }

double PsiMap::value(double z) const { return r_ - r_ * W_.value(arg(z)); }
double PsiMap::deriv(double z) const { return r_ * lambda_ * W_.deriv(arg(z)); }
double PsiMap::deriv2(double z) const { return -r_ * lambda_ * lambda_ * W_.deriv2(arg(z)); }
double PsiMap::nonlinearity(double z) const { return -lambda_ * W_.nonlinearity(arg(z)); }

PhiMap::PhiMap(RootMap Z, double r, double mu, double y, double rho)
    : Z_(std::move(Z)), mu_(mu), domain_(domain_Phi(r, mu, y, rho)) {}

double PhiMap::arg(double z) const { return enter(Z_.domain(), mu_ * (1.0 - z), "Phi"); }

double PhiMap::value(double z) const {
    const double v = enter(Z_.domain(), Z_.value(arg(z)), "Phi inner");
    return 1.0 - Z_.value(v);
}

double PhiMap::deriv(double z) const {
    const double u = arg(z);
    const double v = enter(Z_.domain(), Z_.value(u), "Phi inner");
    return mu_ * Z_.deriv(v) * Z_.deriv(u);
}

double PhiMap::deriv2(double z) const {
    const double u = arg(z);
    const double v = enter(Z_.domain(), Z_.value(u), "Phi inner");
    const double zu = Z_.deriv(u);
    return -mu_ * mu_ * (Z_.deriv2(v) * zu * zu + Z_.deriv(v) * Z_.deriv2(u));
}

double PhiMap::nonlinearity(double z) const {
    const double u = arg(z);
    const double v = enter(Z_.domain(), Z_.value(u), "Phi inner");
    return -mu_ * (Z_.nonlinearity(v) * Z_.deriv(u) + Z_.nonlinearity(u));
}

PsiMap make_Psi(const FuncRep& V, double lambda, double r, double rho) {
    return PsiMap(make_W(V, r, lambda, rho), r, lambda, rho);
}

PhiMap make_Phi(const FuncRep& U, double mu, double y, double r, double rho) {
    return PhiMap(make_Z(U, r, y, rho), r, mu, y, rho);
}

namespace {

// scale^-1 F o inner on F's nodes, then shifted so the result vanishes at 0.
template <class Inner>
FuncRep pull_back(const FuncRep& F, const Inner& inner, double scale, const char* what) {
    const auto nodes = F.nodes();
    std::vector<double> s(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) s[j] = F(enter(F.domain(), inner(nodes[j]), what)) / scale;
    const double c = FuncRep::from_samples(F.domain(), s).eval(0.0);
    for (double& v : s) v -= c;
    return FuncRep::from_samples(F.domain(), std::move(s));
}

}  // namespace

StepResult apply_T(const EpsteinPair& pair) {
    const double r = pair.r, rho = pair.rho;
    const ScalingState s = solve_scalings(pair.U, pair.V, r, rho);
    const PsiMap psi = make_Psi(pair.V, s.lambda, r, rho);
    const PhiMap phi = make_Phi(pair.U, s.mu, s.y, r, rho);
    FuncRep U = pull_back(pair.U, psi, std::pow(s.lambda, rho), "U o Psi");
    FuncRep V = pull_back(pair.V, phi, std::pow(s.mu, rho), "V o Phi");
    return {EpsteinPair{std::move(U), std::move(V), r, rho}, s};
}

bool IterationTrace::class_invariant_holds(double slack) const {
    return std::all_of(records.begin(), records.end(), [&](const IterationRecord& rec) {
        return rec.max_N_Z <= bounds.sigma + slack && rec.max_N_W <= bounds.gamma + slack;
    });
}

bool IterationTrace::brackets_hold() const {
    return std::all_of(records.begin(), records.end(), [](const IterationRecord& rec) { return rec.brackets_hold; });
}

double max_nonlinearity_Z(const FuncRep& U, double r, double rho, int grid) {
    return check_nonlinearity_class(U, r, 0.0, rho, domain_U(r, rho), grid).worst_margin;
}

double max_nonlinearity_W(const FuncRep& V, double r, double rho, int grid) {
    return check_nonlinearity_class(V, 1.0, 0.0, rho, domain_V(r, rho), grid).worst_margin;
}

DecoupledResiduals decoupled_residuals(const EpsteinPair& pair, const ScalingState& s, int grid) {
    const double r = pair.r, rho = pair.rho;
    const PsiMap psi = make_Psi(pair.V, s.lambda, r, rho);
    const PhiMap phi = make_Phi(pair.U, s.mu, s.y, r, rho);
    auto residual = [&](const FuncRep& F, auto&& inner, double scale) {
        double worst = 0.0, size = 0.0;
        for (double z : F.domain().uniform_grid(grid)) {
            const double fz = F(z);
            size = std::max(size, std::abs(fz));
            worst = std::max(worst, std::abs(scale * fz - F(enter(F.domain(), inner(z), "residual"))));
        }
        return worst / size;
    };
    return {residual(pair.U, psi, std::pow(s.lambda, rho)), residual(pair.V, phi, std::pow(s.mu, rho))};
}

IterateResult iterate(const EpsteinPair& pair0, const IterateOptions& opt) {
    if (!(opt.tol > 0.0)) fail(ErrorKind::usage, "iteration tolerance must be positive");
    if (opt.max_iter < 0) fail(ErrorKind::usage, "max_iter must be non-negative");
    pair0.validate();

    const double r = pair0.r, rho = pair0.rho;
    IterationTrace trace;
    trace.bounds = bounds_sigma_gamma(r, rho, opt.delta, opt.epsilon);

    EpsteinPair pair = pair0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    for (int n = 0; n < opt.max_iter && !converged; ++n) {
        StepResult step = apply_T(pair);
        IterationRecord rec;
        rec.n = n;
        rec.lambda = step.scalings.lambda;
        rec.mu = step.scalings.mu;
        rec.y = step.scalings.y;
        rec.sup_diff_U = sup_diff(step.next.U, pair.U, opt.diff_grid);
        rec.sup_diff_V = sup_diff(step.next.V, pair.V, opt.diff_grid);
        rec.max_N_Z = max_nonlinearity_Z(pair.U, r, rho, opt.check_grid);
        rec.max_N_W = max_nonlinearity_W(pair.V, r, rho, opt.check_grid);
        const double d = std::max(rec.sup_diff_U, rec.sup_diff_V);
        rec.ratio = d / prev;
        rec.brackets_hold = step.scalings.brackets_hold();
        prev = d;
        trace.records.push_back(rec);

        if (!rec.brackets_hold)
            fail(ErrorKind::invariant, "scalings left their brackets at iterate " + std::to_string(n) +
                                           ": lambda=" + fmt(rec.lambda) + " mu=" + fmt(rec.mu) + " y=" + fmt(rec.y));
        if (opt.strict_class &&
            (rec.max_N_Z > trace.bounds.sigma + 1e-8 || rec.max_N_W > trace.bounds.gamma + 1e-8))
            fail(ErrorKind::invariant, "nonlinearity class breached at iterate " + std::to_string(n) +
                                           ": max N_Z=" + fmt(rec.max_N_Z) + " (Sigma " + fmt(trace.bounds.sigma) +
                                           "), max N_W=" + fmt(rec.max_N_W) + " (Gamma " +
                                           fmt(trace.bounds.gamma) + ")");
        pair = std::move(step.next);
        converged = d <= opt.tol;
    }
    if (!converged) {
        const std::string last = trace.records.empty() ? "no iterates"
                                                         : "last sup diff " + fmt(prev);
        throw ConvergenceError("no convergence to tol " + fmt(opt.tol) + " within " + std::to_string(opt.max_iter) +
                                   " iterates (" + last + ")",
                               std::move(trace));
    }

    IterateResult out{pair, solve_scalings(pair.U, pair.V, r, rho), std::move(trace), {}};
    out.residuals = decoupled_residuals(out.pair, out.scalings, opt.diff_grid);
    return out;
}

}  // namespace lorenz
