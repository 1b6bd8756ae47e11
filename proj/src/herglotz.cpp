#include "lorenz/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lorenz/errors.hpp"
#include "lorenz/scalings.hpp"

namespace lorenz {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void require_covers(const FuncRep& f, double lo, double hi) {
    const double tol = f.clamp_tolerance();
    if (!f.domain().contains(lo, tol) || !f.domain().contains(hi, tol))
        fail(ErrorKind::usage, "function domain [" + fmt(f.domain().lo) + ", " + fmt(f.domain().hi) +
                                   "] does not cover the check grid [" + fmt(lo) + ", " + fmt(hi) + "]");
}

}  // namespace

bool HerglotzReport::passes(double slack) const {
    return is_increasing && std::abs(value_at_zero) <= 1e-10 && min_third_derivative >= -slack &&
           min_schwarzian >= -slack && first_der_bound_margin >= -slack && second_der_bound_margin >= -slack;
}

HerglotzReport check_omega(const FuncRep& f, const Interval& J, double c_zero, int grid_size) {
    if (grid_size < 100) fail(ErrorKind::usage, "check_omega grid must have at least 100 points");
    if (!(J.lo < c_zero && c_zero < J.hi)) fail(ErrorKind::usage, "c_zero must lie inside J");
    const auto grid = J.interior_grid(grid_size);
    require_covers(f, grid.front(), grid.back());
    require_covers(f, c_zero, c_zero);

    const auto d1 = f.derivative(1), d2 = f.derivative(2), d3 = f.derivative(3);
    const double a = c_zero - J.lo, b = J.hi - c_zero;
    const double skip = 1e-6 * J.width();
    const double inf = std::numeric_limits<double>::infinity();

    HerglotzReport rep;
    rep.grid_size = grid_size;
    rep.value_at_zero = f.eval(c_zero);
    rep.is_increasing = true;
    rep.min_first_derivative = rep.min_third_derivative = rep.min_schwarzian = inf;
    rep.first_der_bound_margin = rep.second_der_bound_margin = inf;

    for (double xg : grid) {
        const double x = xg - c_zero;
        const double v = f.eval(xg), p1 = d1.eval(xg), p2 = d2.eval(xg), p3 = d3.eval(xg);
        if (!(p1 > 0.0)) rep.is_increasing = false;
        rep.min_first_derivative = std::min(rep.min_first_derivative, p1);
        rep.min_third_derivative = std::min(rep.min_third_derivative, p3);
        const double n = p2 / p1;
        rep.min_schwarzian = std::min(rep.min_schwarzian, p3 / p1 - 1.5 * n * n);
        rep.second_der_bound_margin =
            std::min({rep.second_der_bound_margin, p2 + 2.0 * p1 / (a + x), 2.0 * p1 / (b - x) - p2});
        if (std::abs(x) > skip) {
            const double q = p1 / v;
            rep.first_der_bound_margin =
                std::min({rep.first_der_bound_margin, q - a / (x * (a + x)), b / (x * (b - x)) - q});
        }
    }
    return rep;
}

NonlinearityClassReport check_nonlinearity_class(const FuncRep& f, double c, double sigma, double rho,
                                                 const Interval& J, int grid_size) {
    if (!(rho > 1.0)) fail(ErrorKind::usage, "rho must exceed 1");
    const Interval span(-c, J.hi - c);
    const auto grid = span.interior_grid(grid_size);
    require_covers(f, c + grid.front(), c + grid.back());
    const auto d1 = f.derivative(1), d2 = f.derivative(2);

    NonlinearityClassReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const double v = f.eval(c + x);
        if (!(v > 0.0))
            fail(ErrorKind::domain, "f(c+x) = " + fmt(v) + " is not positive at x=" + fmt(x));
        const double p1 = d1.eval(c + x), p2 = d2.eval(c + x);
        const double n = p2 / p1 + (1.0 / rho - 1.0) * p1 / v;
        if (n - sigma > rep.worst_margin) {
            rep.worst_margin = n - sigma;
            rep.worst_x = x;
        }
    }
    rep.inside = rep.worst_margin < 0.0;
    return rep;
}

double nonlinearity_growth_bound(double n_at_x, double x, double y) {
    if (!(y >= x)) fail(ErrorKind::usage, "growth bound needs y >= x");
    const double den = 2.0 - n_at_x * (y - x);
    if (!(den > 0.0)) fail(ErrorKind::blow_up, "nonlinearity bound denominator " + fmt(den) + " is not positive");
    return 2.0 * n_at_x / den;
}

double derivative_growth_bound(double fprime_at_x, double n_at_x, double x, double y) {
    if (!(y >= x)) fail(ErrorKind::usage, "growth bound needs y >= x");
    const double den = 2.0 - n_at_x * (y - x);
    if (!(den > 0.0)) fail(ErrorKind::blow_up, "derivative bound denominator " + fmt(den) + " is not positive");
    return 4.0 * fprime_at_x / (den * den);
}

bool nonlinearity_nondecreasing(const FuncRep& f, int grid_size, double slack) {
    const auto d1 = f.derivative(1), d2 = f.derivative(2);
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : f.domain().interior_grid(grid_size)) {
        const double n = d2.eval(x) / d1.eval(x);
        if (n < prev - slack) return false;
        prev = std::max(prev, n);
    }
    return true;
}

NonlinearityBounds bounds_sigma_gamma(double r, double rho, double delta, double epsilon) {
    if (!(r > 0.0) || !(rho > 1.0))
        fail(ErrorKind::usage, "bounds_sigma_gamma needs r > 0 and rho > 1");
    if (!(delta >= 0.0 && delta < 2.0) || !(epsilon >= 0.0 && epsilon < 2.0))
        fail(ErrorKind::usage, "delta and epsilon must lie in [0, 2)");
    const double lp = lambda_plus(r, rho), mp = mu_plus(r, rho);
    const double zs = r + 1.0 / lp, ws = 1.0 + r / mp;
    return NonlinearityBounds{
        .sigma = -(2.0 - delta) / zs,
        .gamma = -(2.0 - epsilon) / ws,
        .sigma_floor = -2.0 / zs,
        .gamma_floor = -2.0 / ws,
        .delta = delta,
        .epsilon = epsilon,
    };
}

}  // namespace lorenz
