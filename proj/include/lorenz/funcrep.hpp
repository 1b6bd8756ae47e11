#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lorenz {

/// Closed interval [lo, hi] with lo < hi.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    Interval() = default;
    Interval(double lo, double hi);

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }

    /// n equally spaced points including both endpoints (n >= 2).
    std::vector<double> uniform_grid(int n) const;
    /// n equally spaced points strictly inside (lo, hi).
    std::vector<double> interior_grid(int n) const;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Chebyshev-Lobatto nodes of [lo, hi] in ascending order, degree + 1 of them.
std::vector<double> chebyshev_nodes(const Interval& domain, int degree);

/// Polynomial interpolant of a smooth function on an interval, stored as its
/// values at Chebyshev-Lobatto nodes and evaluated with the barycentric formula.
/// Immutable after construction.
class FuncRep {
public:
    static constexpr int min_degree = 8;
    static constexpr int default_degree = 64;

    template <class F>
        requires std::invocable<F&, double>
    static FuncRep build(F&& f, const Interval& domain, int degree) {
        auto nodes = chebyshev_nodes(checked_domain(domain), checked_degree(degree));
        std::vector<double> samples(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) samples[j] = static_cast<double>(f(nodes[j]));
        return FuncRep(domain, std::move(nodes), std::move(samples));
    }

    /// Rebuild from stored node values (degree = samples.size() - 1).
    static FuncRep from_samples(const Interval& domain, std::vector<double> samples);

    /// Identity map x -> x on the domain.
    static FuncRep identity(const Interval& domain, int degree);

    double eval(double x) const;
    double operator()(double x) const { return eval(x); }

    /// Spectral derivative of order 1..3, sampled on the same nodes.
    FuncRep derivative(int order) const;

    /// Chebyshev coefficients c_k of sum c_k T_k(t), t the affine map of the domain to [-1,1].
    std::vector<double> coefficients() const;

    const Interval& domain() const { return domain_; }
    int degree() const { return static_cast<int>(samples_.size()) - 1; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> samples() const { return samples_; }

    /// Endpoint clamping tolerance used by eval.
    double clamp_tolerance() const;

private:
    FuncRep(const Interval& domain, std::vector<double> nodes, std::vector<double> samples);

    static const Interval& checked_domain(const Interval& domain);
    static int checked_degree(int degree);

    Interval domain_;
    std::vector<double> nodes_;
    std::vector<double> samples_;
    std::vector<double> weights_;
};

/// outer o inner sampled on inner's domain at max(degree) nodes. Inner values
/// may overshoot outer's domain by at most 1e-10 (clamped); more is an error.
FuncRep compose(const FuncRep& outer, const FuncRep& inner);

/// Solve f(x) = target for strictly monotone f.
double invert_monotone(const FuncRep& f, double target);

/// max |f - g| over n_grid uniformly spaced points of the common domain.
double sup_diff(const FuncRep& f, const FuncRep& g, int n_grid);

/// f''/f' on the domain shrunk by 1% at each end.
FuncRep nonlinearity(const FuncRep& f);

}  // namespace lorenz
