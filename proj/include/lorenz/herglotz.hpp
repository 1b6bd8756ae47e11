#pragma once

#include "lorenz/funcrep.hpp"

namespace lorenz {

/// Real-slice checks for membership of f in the Herglotz-Pick class on J.
struct HerglotzReport {
    bool is_increasing = false;
    double value_at_zero = 0.0;
    double min_first_derivative = 0.0;
    double min_third_derivative = 0.0;
    double min_schwarzian = 0.0;
    // min over the grid of the slack in  a/(x(a+x)) <= f'/f <= b/(x(b-x))
    double first_der_bound_margin = 0.0;
    // min over the grid of the slack in  -2f'/(a+x) <= f'' <= 2f'/(b-x)
    double second_der_bound_margin = 0.0;
    int grid_size = 0;

    /// All sign conditions hold up to `slack`.
    bool passes(double slack = 1e-8) const;
};

struct NonlinearityBounds {
    double sigma = 0.0;        // Sigma(r)
    double gamma = 0.0;        // Gamma(r)
    double sigma_floor = 0.0;  // -2 / (r + 1/lambda_+)
    double gamma_floor = 0.0;  // -2 / (1 + r/mu_+)
    double delta = 0.0;
    double epsilon = 0.0;
};

struct NonlinearityClassReport {
    bool inside = false;
    double worst_margin = 0.0;  // max over the grid of N(x) - sigma
    double worst_x = 0.0;
};

inline constexpr int default_check_grid = 200;
inline constexpr double default_delta = 0.05;
inline constexpr double default_epsilon = 0.05;

HerglotzReport check_omega(const FuncRep& f, const Interval& J, double c_zero = 0.0,
                           int grid_size = default_check_grid);

/// Checks that x -> (f(c+x))^{1/rho} has nonlinearity < sigma on the interior
/// grid of (-c, J.hi - c).
NonlinearityClassReport check_nonlinearity_class(const FuncRep& f, double c, double sigma, double rho,
                                                 const Interval& J, int grid_size = default_check_grid);

/// f''/f' is nondecreasing (up to slack) on the interior grid of f's domain.
bool nonlinearity_nondecreasing(const FuncRep& f, int grid_size = default_check_grid, double slack = 1e-8);

/// Lower bound for N(y) given N(x), from positivity of the Schwarzian.
double nonlinearity_growth_bound(double n_at_x, double x, double y);

/// Lower bound for f'(y) given f'(x) and N(x).
double derivative_growth_bound(double fprime_at_x, double n_at_x, double x, double y);

NonlinearityBounds bounds_sigma_gamma(double r, double rho, double delta = default_delta,
                                      double epsilon = default_epsilon);

}  // namespace lorenz
