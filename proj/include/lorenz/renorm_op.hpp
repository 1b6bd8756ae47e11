#pragma once

#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/funcrep.hpp"
#include "lorenz/herglotz.hpp"
#include "lorenz/scalings.hpp"

namespace lorenz {

// Domains on which U, V and the derived maps live, as functions of r (and rho).
Interval domain_U(double r, double rho);  // (r - r/(l+ m+), r + 1/l+)
Interval domain_V(double r, double rho);  // (1 - 1/(l+ sqrt(m+)), 1 + r/m+)
Interval domain_Z(double r, double rho);  // (-r, 1/l+)
Interval domain_W(double r, double rho);  // (-1, r/m+)
Interval domain_Psi(double r, double lambda, double rho);
Interval domain_Phi(double r, double mu, double y, double rho);

/// The pair (U, V) acted on by T_r.
struct EpsteinPair {
    FuncRep U;
    FuncRep V;
    double r = 0.0;
    double rho = 0.0;

    /// U = V = identity on J_U, J_V.
    static EpsteinPair identity(double r, double rho, int degree = FuncRep::default_degree);

    /// Throws ErrorKind::invariant if U(0), V(0) are not ~0, U or V are not
    /// increasing on their nodes, or the domains do not match r.
    void validate() const;
};

/// x -> p_{1/rho}( F(shift + x) / F(anchor) ), evaluated from F and its
/// derivatives. Z uses (U, r, r + y), W uses (V, 1, lambda r + 1).
/// F is measured from its pinned zero F(0), so the root vanishes exactly at x = -shift.
class RootMap {
public:
    RootMap(const FuncRep& F, double shift, double anchor, double rho, const Interval& domain);

    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
    double nonlinearity(double x) const;
    double operator()(double x) const { return value(x); }

    const Interval& domain() const { return domain_; }

private:
    double base(double x) const;  // F(shift + x), branch-checked

    FuncRep f_, d1_, d2_;
    double shift_;
    double f0_;
    double norm_;
    double rho_;
    Interval domain_;
};

RootMap make_Z(const FuncRep& U, double r, double y, double rho);
RootMap make_W(const FuncRep& V, double r, double lambda, double rho);

/// Psi(z) = r - r W(lambda (r - z)).
class PsiMap {
public:
    PsiMap(RootMap W, double r, double lambda, double rho);

    double value(double z) const;
    double deriv(double z) const;
    double deriv2(double z) const;
    double nonlinearity(double z) const;
    double operator()(double z) const { return value(z); }
    const Interval& domain() const { return domain_; }

private:
    double arg(double z) const;

    RootMap W_;
    double r_;
    double lambda_;
    Interval domain_;
};

/// Phi(z) = 1 - Z(Z(mu (1 - z))).
class PhiMap {
public:
    PhiMap(RootMap Z, double r, double mu, double y, double rho);

    double value(double z) const;
    double deriv(double z) const;
    double deriv2(double z) const;
    double nonlinearity(double z) const;
    double operator()(double z) const { return value(z); }
    const Interval& domain() const { return domain_; }

private:
    double arg(double z) const;

    RootMap Z_;
    double mu_;
    Interval domain_;
};

PsiMap make_Psi(const FuncRep& V, double lambda, double r, double rho);
PhiMap make_Phi(const FuncRep& U, double mu, double y, double r, double rho);

struct StepResult {
    EpsteinPair next;
    ScalingState scalings;
};

/// One application of T_r: (lambda^-rho U o Psi, mu^-rho V o Phi), resampled
/// on the J_U, J_V nodes and pinned so that U(0) = V(0) = 0.
StepResult apply_T(const EpsteinPair& pair);

struct IterationRecord {
    int n = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double y = 0.0;
    double sup_diff_U = 0.0;
    double sup_diff_V = 0.0;
    double max_N_Z = 0.0;
    double max_N_W = 0.0;
    double ratio = 0.0;  // NaN for the first record
    bool brackets_hold = false;
};

struct IterationTrace {
    NonlinearityBounds bounds;
    std::vector<IterationRecord> records;

    /// Every record has max_N_Z <= Sigma + slack and max_N_W <= Gamma + slack.
    bool class_invariant_holds(double slack = 1e-8) const;
    bool brackets_hold() const;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, IterationTrace trace)
        : Error(ErrorKind::convergence, what), trace_(std::move(trace)) {}
    const IterationTrace& trace() const { return trace_; }

private:
    IterationTrace trace_;
};

struct IterateOptions {
    double tol = 1e-12;
    int max_iter = 200;
    int diff_grid = 256;
    int check_grid = default_check_grid;
    double delta = default_delta;
    double epsilon = default_epsilon;
    // Nonlinearity-class breaches raise ErrorKind::invariant instead of being recorded only.
    bool strict_class = false;
};

struct DecoupledResiduals {
    double U = 0.0;  // sup |lambda^rho U - U o Psi| / sup |U| on the diff grid of J_U
    double V = 0.0;  // sup |mu^rho V - V o Phi| / sup |V| on the diff grid of J_V
};

struct IterateResult {
    EpsteinPair pair;
    ScalingState scalings;  // solved for the returned pair
    IterationTrace trace;
    DecoupledResiduals residuals;
};

/// max over the interior grid of J_Z of N_Z, and of J_W of N_W.
double max_nonlinearity_Z(const FuncRep& U, double r, double rho, int grid = default_check_grid);
double max_nonlinearity_W(const FuncRep& V, double r, double rho, int grid = default_check_grid);

DecoupledResiduals decoupled_residuals(const EpsteinPair& pair, const ScalingState& s, int grid = 256);

/// Iterate T_r until both components move by at most tol on the diff grid.
IterateResult iterate(const EpsteinPair& pair0, const IterateOptions& options = {});

}  // namespace lorenz
