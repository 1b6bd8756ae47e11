#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorenz/renorm_op.hpp"

namespace lorenz {

inline constexpr double default_tol_r = 1e-8;
inline constexpr double default_iterate_tol = 1e-12;
inline constexpr double working_r_lo = 0.05;
inline constexpr double working_r_hi = 2.0;

struct FixedPointOptions {
    int degree = FuncRep::default_degree;
    double iterate_tol = default_iterate_tol;
    int max_iter = 200;
    double tol_r = default_tol_r;
    int scan_points = 16;
    int map_grid = 200;
    int max_bisections = 100;
    bool strict_class = false;
    double delta = default_delta;
    double epsilon = default_epsilon;

    IterateOptions iterate_options() const;
};

/// lambda and mu of the fixed point of T_r reached from identity seeds.
struct GapSample {
    double r = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double gap = 0.0;  // lambda - mu
    std::string error;  // empty unless the evaluation failed (gap is NaN then)
    std::optional<ErrorKind> error_kind;
};

GapSample scaling_gap_sample(double r, double rho, const FixedPointOptions& opt = {});
double scaling_gap(double r, double rho, double iterate_tol = default_iterate_tol,
                   int degree = FuncRep::default_degree);

/// The Lorenz map f = l o |x|^rho on [-1, 0), g = t o |x|^rho on (0, r].
struct LorenzMapModel {
    double rho = 0.0;
    double r = 0.0;
    double lambda = 0.0;
    double a = 0.0;
    double b = 0.0;
    FuncRep l_branch;  // on [0, 1]
    FuncRep t_branch;  // on [0, r^rho]
    std::optional<EpsteinPair> source;

    double f(double x) const;  // x in [-1, 0]
    double g(double x) const;  // x in [0, r]
    /// -f(f(-1)), the rescaling of the next renormalization.
    double lambda_from_map() const;
};

LorenzMapModel reconstruct_lorenz(const EpsteinPair& pair, const ScalingState& scalings);

/// One renormalization step of type ({0,1},{1,0,0}) applied to the model.
LorenzMapModel renormalize_map(const LorenzMapModel& m);

struct MapResiduals {
    double f = 0.0;  // sup |f^ - f| over the interior grid of [-1, 0)
    double g = 0.0;  // sup |g^ - g| over the interior grid of (0, r]
    double lambda_consistency = 0.0;  // |-f(f(-1)) - lambda|
};

/// Residual of R(f, g) = (f, g), composing the branches directly.
MapResiduals map_residuals(const LorenzMapModel& m, int grid = 200);

struct LorenzDefinitionReport {
    bool f_increasing = false;
    bool g_increasing = false;
    bool range_ok = false;
    double f_max = 0.0;
    double g_min = 0.0;
    double factorization_error = 0.0;  // NaN without a source pair
    bool passes() const;
};

LorenzDefinitionReport check_lorenz_definition(const LorenzMapModel& m, int grid = 500);

struct SolveResiduals {
    double decoupled_U = 0.0;
    double decoupled_V = 0.0;
    double map_f = 0.0;
    double map_g = 0.0;
    double lambda_consistency = 0.0;
};

struct SolveResult {
    double rho = 0.0;
    double r_star = 0.0;
    double lambda_star = 0.0;
    double mu_star = 0.0;
    EpsteinPair pair_star;
    ScalingState scalings;
    LorenzMapModel map;
    SolveResiduals residuals;
    IterationTrace trace;
    std::vector<GapSample> scan;
    int bisections = 0;
};

/// Scalings, residuals and reconstruction of an already converged pair. The
/// trace holds a single record describing the pair itself. The pair is not
/// validated here; audit reports its invariants. Residuals whose evaluation
/// fails (composition escape, orbit leaving a branch) are +inf.
SolveResult assess_pair(const EpsteinPair& pair, const FixedPointOptions& opt = {});

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double limit = 0.0;
    bool gating = true;  // non-gating checks are reported only
};

inline constexpr double decoupled_residual_limit = 1e-9;
inline constexpr double map_residual_limit = 1e-6;
inline constexpr double lambda_consistency_limit = 1e-8;

/// Invariant suite of a solve: pair normalization, brackets, Herglotz real-slice checks, Lorenz
/// map definition, residual thresholds and the lambda = mu match. The
/// nonlinearity class is gating only with opt.strict_class.
std::vector<Check> audit(const SolveResult& s, const FixedPointOptions& opt = {});
bool gating_checks_pass(const std::vector<Check>& checks);

/// First sign change of lambda - mu over a left-to-right scan of the bracket,
/// refined by bisection, with the reconstruction at the root attached. When
/// every scan point fails, the first failure is rethrown with its own kind.
SolveResult find_critical_r(double rho, const Interval& bracket, const FixedPointOptions& opt = {});

}  // namespace lorenz
