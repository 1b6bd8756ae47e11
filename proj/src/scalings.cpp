#include "lorenz/scalings.hpp"

#include <cmath>
#include <sstream>

#include "lorenz/errors.hpp"
#include "lorenz/roots.hpp"

namespace lorenz {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void check_params(double r, double rho) {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::usage, "r must be positive, got " + fmt(r));
    if (!(rho > 1.0) || !std::isfinite(rho)) fail(ErrorKind::usage, "rho must exceed 1, got " + fmt(rho));
}

}  // namespace

bool ScalingState::brackets_hold() const {
    return lambda_lo < lambda && lambda < lambda_hi && mu_lo < mu && mu < mu_hi && mu < y && y < 1.0;
}

double lambda_plus(double r, double rho) {
    check_params(r, rho);
    return std::pow(r / (r + 1.0), 1.0 / rho);
}

double mu_plus(double r, double rho) {
    check_params(r, rho);
    return std::pow(1.0 / ((r + 1.0) * (r + 1.0)), 1.0 / rho);
}

double lambda_minus(double r, double rho) {
    const double lp = lambda_plus(r, rho);
    const double smp = std::sqrt(mu_plus(r, rho));
    const double inner = (r / rho) * (1.0 - smp * lp) / ((lp * r + 1.0) * (1.0 + smp * lp * lp * r));
    return std::pow(inner, 1.0 / (rho - 1.0));
}

double y_floor(double r, double mu) {
    return 0.5 * (std::sqrt(r * r + 4.0 * (r + mu)) - r);
}

double mu_minus(double r, double rho) {
    const double lp = lambda_plus(r, rho), mp = mu_plus(r, rho);
    const double ym = y_floor(r, mp);
    const double q = 1.0 - lp * mp;
    const double inner = ym * r * r / (rho * rho) * q * q /
                         ((r + 1.0) * (r + mp) * (r + lp * mp) * (r + lp * mp * mp));
    return std::pow(inner, 1.0 / (rho - 1.0));
}

double solve_y(const FuncRep& U, double r, double mu, double rho) {
    check_params(r, rho);
    if (!(mu > 0.0 && mu < 1.0)) fail(ErrorKind::usage, "solve_y needs 0 < mu < 1, got " + fmt(mu));
    const double target = U.eval(r + mu);
    auto f = [&](double y) { return std::pow(y, rho) * U.eval(r + y) - target; };
    const double f_lo = f(mu), f_hi = f(1.0);
    if (!(f_lo < 0.0 && f_hi > 0.0))
        fail(ErrorKind::inconsistent, "y-equation sign conditions violated: f(mu)=" + fmt(f_lo) +
                                          ", f(1)=" + fmt(f_hi) + " (U must be positive and increasing)");
    return bisect(f, mu, 1.0).x;
}

double lambda_residual(const FuncRep& V, const FuncRep& dV, double lambda, double r, double rho) {
    const double z = lambda * r + 1.0;
    return std::pow(lambda, rho - 1.0) - (r / rho) * dV.eval(z) / V.eval(z);
}

double solve_lambda(const FuncRep& V, double r, double rho) {
    const double lo = lambda_minus(r, rho), hi = lambda_plus(r, rho);
    const auto dV = V.derivative(1);
    auto f = [&](double l) { return lambda_residual(V, dV, l, r, rho); };
    try {
        return bisect(f, lo, hi).x;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::bracket) throw;
        fail(ErrorKind::bracket, std::string("lambda-equation: ") + e.what() +
                                     " (V outside the class or r outside the working range)");
    }
}

double mu_residual(const FuncRep& U, const FuncRep& dU, double mu, double r, double rho) {
    const double y = solve_y(U, r, mu, rho);
    const double zp_mu = y / rho * dU.eval(r + mu) / U.eval(r + mu);
    const double zp_y = dU.eval(r + y) / (rho * U.eval(r + y));
    return std::pow(mu, rho - 1.0) - zp_y * zp_mu;
}

MuSolution solve_mu(const FuncRep& U, double r, double rho) {
    const double lo = mu_minus(r, rho), hi = mu_plus(r, rho);
    const auto dU = U.derivative(1);
    auto g = [&](double m) { return mu_residual(U, dU, m, r, rho); };
    double mu = 0.0;
    try {
        mu = bisect(g, lo, hi).x;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::bracket) throw;
        fail(ErrorKind::bracket, std::string("mu-equation: ") + e.what() +
                                     " (U outside the class or r outside the working range)");
    }
    return {mu, solve_y(U, r, mu, rho)};
}

Normalizations normalizations(const FuncRep& U, const FuncRep& V, double r, double lambda, double y,
                              double rho) {
    const double vu = U.eval(r + y);
    const double vv = V.eval(lambda * r + 1.0);
    if (!(vu > 0.0)) fail(ErrorKind::domain, "U(r+y) = " + fmt(vu) + " is not positive");
    if (!(vv > 0.0)) fail(ErrorKind::domain, "V(lambda r + 1) = " + fmt(vv) + " is not positive");
    return {1.0 / vu, std::pow(r, rho) / vv};
}

ScalingState solve_scalings(const FuncRep& U, const FuncRep& V, double r, double rho) {
    ScalingState s;
    s.lambda_lo = lambda_minus(r, rho);
    s.lambda_hi = lambda_plus(r, rho);
    s.mu_lo = mu_minus(r, rho);
    s.mu_hi = mu_plus(r, rho);
    s.lambda = solve_lambda(V, r, rho);
    const auto m = solve_mu(U, r, rho);
    s.mu = m.mu;
    s.y = m.y;
    s.y_floor = y_floor(r, s.mu);
    const auto n = normalizations(U, V, r, s.lambda, s.y, rho);
    s.a = n.a;
    s.b = n.b;
    return s;
}

}  // namespace lorenz
