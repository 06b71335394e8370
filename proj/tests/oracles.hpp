#ifndef NERNST_TESTS_ORACLES_HPP
#define NERNST_TESTS_ORACLES_HPP

// Closed-form and brute-force references. Nothing here calls into the library.

#include <cmath>
#include <cstdint>

namespace oracle {

// Two levels {0, gap}, nondegenerate.
inline double two_level_z(double gap, double t) { return 1.0 + std::exp(-gap / t); }
inline double two_level_p0(double gap, double t) { return 1.0 / two_level_z(gap, t); }
inline double two_level_entropy(double gap, double t)
{
    const double p0 = two_level_p0(gap, t);
    const double p1 = 1.0 - p0;
    return -(p0 * std::log(p0) + (p1 > 0 ? p1 * std::log(p1) : 0.0));
}
inline double two_level_heat_capacity(double gap, double t)
{
    const double p0 = two_level_p0(gap, t);
    return gap * gap * p0 * (1.0 - p0) / (t * t);
}

// Infinite ladder E_i = i * w.
inline double harmonic_entropy(double w, double t)
{
    const double q = std::exp(-w / t);
    return -std::log1p(-q) + (w / t) * q / (1.0 - q);
}

// Smallest n >= 1 with exp(-E_n / T) < tol for E_n = n * w.
inline long harmonic_truncation(double w, double t, double tol)
{
    long n = 1;
    while (!(std::exp(-static_cast<double>(n) * w / t) < tol))
        ++n;
    return n;
}

// Plain bisection for an increasing function on [lo, hi].
template <typename F>
double bisect(F f, double lo, double hi, int iterations = 200)
{
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace oracle

#endif
