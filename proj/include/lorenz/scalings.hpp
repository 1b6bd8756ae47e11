#pragma once

#include "lorenz/funcrep.hpp"

namespace lorenz {

/// Solved scaling parameters of one operator step, with the brackets they
/// were searched in.
struct ScalingState {
    double lambda = 0.0;
    double mu = 0.0;
    double y = 0.0;
    double a = 0.0;
    double b = 0.0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    double y_floor = 0.0;  // y_-(r, mu) at the solved mu

    /// lambda, mu, y strictly inside their brackets.
    bool brackets_hold() const;
};

double lambda_plus(double r, double rho);
double mu_plus(double r, double rho);
double lambda_minus(double r, double rho);
/// Uses y_- evaluated at mu = mu_+.
double mu_minus(double r, double rho);
/// y_-(r, mu) = (sqrt(r^2 + 4(r + mu)) - r) / 2, the concavity floor for y.
double y_floor(double r, double mu);

/// Root y in (mu, 1) of y^rho U(r+y) = U(r+mu).
double solve_y(const FuncRep& U, double r, double mu, double rho);

/// Residual lambda^{rho-1} - (r/rho) V'(lambda r + 1) / V(lambda r + 1).
double lambda_residual(const FuncRep& V, const FuncRep& dV, double lambda, double r, double rho);

/// Root lambda in (lambda_-, lambda_+) of lambda^rho = Psi'(0).
double solve_lambda(const FuncRep& V, double r, double rho);

struct MuSolution {
    double mu = 0.0;
    double y = 0.0;
};

/// Residual g(mu) = mu^{rho-1} - Z'(y) Z'(mu) with y re-solved for this mu.
double mu_residual(const FuncRep& U, const FuncRep& dU, double mu, double r, double rho);

/// Root mu in (mu_-, mu_+) of mu^rho = Phi'(0), with its matched y.
MuSolution solve_mu(const FuncRep& U, double r, double rho);

struct Normalizations {
    double a = 0.0;
    double b = 0.0;
};

/// a = 1 / U(r+y), b = r^rho / V(lambda r + 1).
Normalizations normalizations(const FuncRep& U, const FuncRep& V, double r, double lambda, double y,
                              double rho);

/// Solve lambda, mu, y and the normalizations for the pair (U, V) at r.
ScalingState solve_scalings(const FuncRep& U, const FuncRep& V, double r, double rho);

}  // namespace lorenz
