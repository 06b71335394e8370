#ifndef NERNST_ROOTS_HPP
#define NERNST_ROOTS_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "nernst/error.hpp"

namespace nernst {

/**
 * Bisection for a nondecreasing function with f(lo) <= 0 <= f(hi).
 *
 * Stops once hi - lo <= rel_tol * hi and returns the midpoint.
 */
template <typename Scalar, typename F>
Scalar bisect_increasing(F&& f, Scalar lo, Scalar hi, Scalar rel_tol, int max_iter = 500)
{
    using std::abs;
    for (int it = 0; it < max_iter; ++it) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (hi - lo <= rel_tol * std::max(abs(lo), abs(hi)) || mid == lo || mid == hi)
            return mid;
        if (f(mid) <= Scalar(0))
            lo = mid;
        else
            hi = mid;
    }
    throw NumericalError("bisection did not converge in " + std::to_string(max_iter) +
                             " iterations",
                         static_cast<double>(hi - lo));
}

/**
 * Illinois (modified regula falsi) on a bracket [lo, hi] of an increasing
 * function with f(lo) < 0 < f(hi). Every fourth iteration that fails to halve
 * the bracket is replaced by a bisection step, so the bracket always shrinks.
 */
template <typename Scalar, typename F>
Scalar illinois_increasing(F&& f, Scalar lo, Scalar flo, Scalar hi, Scalar fhi, Scalar rel_tol,
                           int max_iter = 500)
{
    using std::abs;
    int side = 0;
    Scalar checkpoint_width = hi - lo;
    for (int it = 0; it < max_iter; ++it) {
        const Scalar width = hi - lo;
        if (width <= rel_tol * std::max(abs(lo), abs(hi)))
            return lo + width / 2;

        Scalar x = (lo * fhi - hi * flo) / (fhi - flo);
        bool bisect = !(x > lo && x < hi);
        if (it % 4 == 3) {
            bisect = bisect || width > checkpoint_width / 2;
            checkpoint_width = width;
        }
        if (bisect)
            x = lo + width / 2;
        if (x == lo || x == hi)
            return x;

        const Scalar fx = f(x);
        if (fx == Scalar(0))
            return x;
        if (fx < Scalar(0)) {
            lo = x;
            flo = fx;
            if (side == -1)
                fhi /= 2;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1)
                flo /= 2;
            side = 1;
        }
    }
    throw NumericalError("root solve did not converge in " + std::to_string(max_iter) +
                             " iterations",
                         static_cast<double>(hi - lo));
}

} // namespace nernst

#endif // NERNST_ROOTS_HPP
