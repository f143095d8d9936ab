#pragma once

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace freeplate {

/// Bisection on a sign bracket [lo, hi]. Iterates until the bracket is no wider than
/// `tol` (or stops shrinking in floating point) and returns its midpoint.
/// Throws domain_error if f(lo) and f(hi) have the same strict sign.
template <class F>
double bisect(F&& f, double lo, double hi, double tol)
{
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if (std::signbit(flo) == std::signbit(fhi)) {
        std::ostringstream msg;
        msg << "bisect: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", " << fhi
            << ")";
        throw domain_error(msg.str());
    }
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fmid = f(mid);
        if (fmid == 0.0) {
            return mid;
        }
        if (std::signbit(fmid) == std::signbit(flo)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

} // namespace freeplate
