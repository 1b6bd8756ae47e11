#pragma once

#include <cmath>
#include <sstream>

#include "lorenz/errors.hpp"

namespace lorenz {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;  // f(x)
    int iterations = 0;
};

/// Bisection on a bracket [lo, hi] where f changes sign. Runs until the
/// bracket collapses to adjacent doubles (or |hi-lo| <= xtol), capped at
/// max_iter halvings, and returns the endpoint with the smaller |f|.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double xtol = 0.0, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};
    if (!(std::signbit(flo) != std::signbit(fhi)) || !std::isfinite(flo) || !std::isfinite(fhi)) {
        std::ostringstream os;
        os.precision(17);
        os << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << flo
           << ", f(hi)=" << fhi;
        fail(ErrorKind::bracket, os.str());
    }
    int it = 0;
    for (; it < max_iter; ++it) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi || std::abs(hi - lo) <= xtol) break;
        double fm = f(mid);
        if (fm == 0.0) return {mid, 0.0, it + 1};
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    if (std::abs(flo) <= std::abs(fhi)) return {lo, flo, it};
    return {hi, fhi, it};
}

}  // namespace lorenz
