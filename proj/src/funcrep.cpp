#include "lorenz/funcrep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lorenz/errors.hpp"
#include "lorenz/roots.hpp"

namespace lorenz {

namespace {

constexpr double compose_tolerance = 1e-10;
constexpr double nonlinearity_shrink = 0.01;
constexpr double min_derivative = 1e-10;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Sum_k c_k T_k(t) by Clenshaw recurrence.
double clenshaw(std::span<const double> c, double t) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        double b0 = 2.0 * t * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

}  // namespace

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        fail(ErrorKind::usage, "interval requires finite lo < hi, got [" + fmt(lo) + ", " + fmt(hi) + "]");
}

std::vector<double> Interval::uniform_grid(int n) const {
    if (n < 2) fail(ErrorKind::usage, "uniform grid needs at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = lo + width() * i / (n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> Interval::interior_grid(int n) const {
    if (n < 1) fail(ErrorKind::usage, "interior grid needs at least 1 point");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[i] = lo + width() * (i + 1) / (n + 1);
    return g;
}

std::vector<double> chebyshev_nodes(const Interval& domain, int degree) {
    std::vector<double> x(static_cast<std::size_t>(degree) + 1);
    const double half = 0.5 * domain.width();
    for (int j = 0; j <= degree; ++j)
        x[j] = domain.mid() - half * std::cos(std::numbers::pi * j / degree);
    // exact endpoints and symmetric midpoint
    x.front() = domain.lo;
    x.back() = domain.hi;
    if (degree % 2 == 0) x[degree / 2] = domain.mid();
    return x;
}

const Interval& FuncRep::checked_domain(const Interval& domain) {
    if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi) || !(domain.lo < domain.hi))
        fail(ErrorKind::usage, "FuncRep domain must satisfy lo < hi");
    return domain;
}

int FuncRep::checked_degree(int degree) {
    if (degree < min_degree)
        fail(ErrorKind::usage, "FuncRep degree must be >= " + std::to_string(min_degree) +
                                   ", got " + std::to_string(degree));
    return degree;
}

FuncRep::FuncRep(const Interval& domain, std::vector<double> nodes, std::vector<double> samples)
    : domain_(domain), nodes_(std::move(nodes)), samples_(std::move(samples)) {
    for (std::size_t j = 0; j < samples_.size(); ++j) {
        if (!std::isfinite(samples_[j]))
            fail(ErrorKind::construction, "non-finite sample " + fmt(samples_[j]) + " at node " +
                                              std::to_string(j) + " (x=" + fmt(nodes_[j]) + ")");
    }
    const std::size_t n = samples_.size() - 1;
    weights_.resize(samples_.size());
    for (std::size_t j = 0; j <= n; ++j) {
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n) w *= 0.5;
        weights_[j] = w;
    }
}

FuncRep FuncRep::from_samples(const Interval& domain, std::vector<double> samples) {
    checked_domain(domain);
    checked_degree(static_cast<int>(samples.size()) - 1);
    auto nodes = chebyshev_nodes(domain, static_cast<int>(samples.size()) - 1);
    return FuncRep(domain, std::move(nodes), std::move(samples));
}

FuncRep FuncRep::identity(const Interval& domain, int degree) {
    return build([](double x) { return x; }, domain, degree);
}

double FuncRep::clamp_tolerance() const {
    return 1e-12 * std::max(1.0, domain_.width());
}

double FuncRep::eval(double x) const {
    if (!(x >= domain_.lo) || !(x <= domain_.hi)) {
        const double tol = clamp_tolerance();
        if (!domain_.contains(x, tol))
            fail(ErrorKind::domain, "evaluation point " + fmt(x) + " outside domain [" +
                                        fmt(domain_.lo) + ", " + fmt(domain_.hi) + "]");
        x = std::clamp(x, domain_.lo, domain_.hi);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double d = x - nodes_[j];
        if (d == 0.0) return samples_[j];
        const double t = weights_[j] / d;
        num += t * samples_[j];
        den += t;
    }
    return num / den;
}

std::vector<double> FuncRep::coefficients() const {
    // samples_[j] sits at t = cos(pi (n - j) / n)
    const int n = degree();
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int m = 0; m <= n; ++m) {
            double v = samples_[n - m];
            if (m == 0 || m == n) v *= 0.5;
            // cos(pi m k / n) with the argument reduced mod 2n for accuracy
            const long long idx = (static_cast<long long>(m) * k) % (2LL * n);
            s += v * std::cos(std::numbers::pi * static_cast<double>(idx) / n);
        }
        c[k] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    return c;
}

FuncRep FuncRep::derivative(int order) const {
    if (order < 1 || order > 3)
        fail(ErrorKind::usage, "derivative order must be in {1,2,3}, got " + std::to_string(order));
    if (degree() < order + 4)
        fail(ErrorKind::usage, "degree " + std::to_string(degree()) + " too small for derivative order " +
                                   std::to_string(order));
    auto c = coefficients();
    const double scale = 2.0 / domain_.width();
    for (int o = 0; o < order; ++o) {
        const std::size_t n = c.size() - 1;
        std::vector<double> d(c.size(), 0.0);
        if (n >= 1) {
            d[n - 1] = 2.0 * n * c[n];
            for (std::size_t k = n - 1; k >= 1; --k) {
                d[k - 1] = (k + 1 < d.size() ? d[k + 1] : 0.0) + 2.0 * k * c[k];
            }
            d[0] *= 0.5;
        }
        for (auto& v : d) v *= scale;
        c = std::move(d);
    }
    std::vector<double> s(nodes_.size());
    const int n = degree();
    for (int j = 0; j <= n; ++j) {
        const double t = std::cos(std::numbers::pi * (n - j) / n);
        s[j] = clenshaw(c, t);
    }
    return FuncRep(domain_, nodes_, std::move(s));
}

FuncRep compose(const FuncRep& outer, const FuncRep& inner) {
    const int degree = std::max(outer.degree(), inner.degree());
    auto nodes = chebyshev_nodes(inner.domain(), degree);
    const Interval& od = outer.domain();
    double worst = 0.0;
    double worst_x = nodes.front();
    std::vector<double> inner_values(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double v = inner.eval(nodes[j]);
        inner_values[j] = v;
        const double over = std::max(od.lo - v, v - od.hi);
        if (over > worst) {
            worst = over;
            worst_x = nodes[j];
        }
    }
    if (worst > compose_tolerance)
        fail(ErrorKind::composition, "inner range escapes outer domain [" + fmt(od.lo) + ", " + fmt(od.hi) +
                                         "] by " + fmt(worst) + " at node x=" + fmt(worst_x));
    std::vector<double> samples(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        samples[j] = outer.eval(std::clamp(inner_values[j], od.lo, od.hi));
    return FuncRep::from_samples(inner.domain(), std::move(samples));
}

double invert_monotone(const FuncRep& f, double target) {
    const auto df = f.derivative(1);
    double scale = 0.0;
    for (double v : df.samples()) scale = std::max(scale, std::abs(v));
    const double zero_tol = 1e-12 * scale;
    int pos = 0, neg = 0;
    for (double v : df.samples()) {
        if (v > zero_tol) ++pos;
        if (v < -zero_tol) ++neg;
    }
    if ((pos > 0 && neg > 0) || (pos == 0 && neg == 0))
        fail(ErrorKind::precondition, "function is not strictly monotone on its node grid");

    const Interval& d = f.domain();
    const double flo = f.eval(d.lo), fhi = f.eval(d.hi);
    const double tol = 1e-12 * std::max(1.0, std::abs(target));
    const double fmin = std::min(flo, fhi), fmax = std::max(flo, fhi);
    if (target < fmin - tol || target > fmax + tol)
        fail(ErrorKind::range, "target " + fmt(target) + " outside range [" + fmt(fmin) + ", " + fmt(fmax) + "]");
    if (target <= fmin) return pos > 0 ? d.lo : d.hi;
    if (target >= fmax) return pos > 0 ? d.hi : d.lo;

    auto root = bisect([&](double x) { return f.eval(x) - target; }, d.lo, d.hi);
    if (std::abs(root.residual) > tol)
        fail(ErrorKind::range, "inversion residual " + fmt(root.residual) + " exceeds tolerance for target " +
                                   fmt(target));
    return root.x;
}

double sup_diff(const FuncRep& f, const FuncRep& g, int n_grid) {
    if (n_grid < 2) fail(ErrorKind::usage, "sup_diff needs n_grid >= 2");
    const double lo = std::max(f.domain().lo, g.domain().lo);
    const double hi = std::min(f.domain().hi, g.domain().hi);
    if (!(lo < hi)) fail(ErrorKind::usage, "sup_diff on disjoint domains");
    double worst = 0.0;
    for (double x : Interval(lo, hi).uniform_grid(n_grid))
        worst = std::max(worst, std::abs(f.eval(x) - g.eval(x)));
    return worst;
}

FuncRep nonlinearity(const FuncRep& f) {
    const auto d1 = f.derivative(1);
    const auto d2 = f.derivative(2);
    const Interval& d = f.domain();
    const double shrink = nonlinearity_shrink * d.width();
    const Interval inner(d.lo + shrink, d.hi - shrink);
    return FuncRep::build(
        [&](double x) {
            const double p = d1.eval(x);
            if (std::abs(p) < min_derivative)
                fail(ErrorKind::singular, "f' = " + fmt(p) + " below 1e-10 at x=" + fmt(x));
            return d2.eval(x) / p;
        },
        inner, f.degree());
}

}  // namespace lorenz
