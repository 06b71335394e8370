#ifndef NERNST_QUADRATURE_HPP
#define NERNST_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "nernst/error.hpp"

namespace nernst {

template <typename Scalar>
struct QuadratureResult {
    Scalar value{};
    Scalar error{};
    int intervals = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-12;
    int max_intervals = 2000;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.000000000000000000000000000000000L};

inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};

// Gauss weights for the odd Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <typename Scalar>
struct Panel {
    Scalar a, b, value, error;
};

template <typename Scalar, typename F>
Panel<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b)
{
    const Scalar centre = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    const Scalar fc = f(centre);
    Scalar kronrod = fc * static_cast<Scalar>(kKronrodWeights[7]);
    Scalar gauss = fc * static_cast<Scalar>(kGaussWeights[3]);
    for (int j = 0; j < 7; ++j) {
        const Scalar dx = half * static_cast<Scalar>(kKronrodNodes[j]);
        const Scalar sum = f(centre - dx) + f(centre + dx);
        kronrod += static_cast<Scalar>(kKronrodWeights[j]) * sum;
        if (j % 2 == 1)
            gauss += static_cast<Scalar>(kGaussWeights[j / 2]) * sum;
    }
    using std::abs;
    return {a, b, kronrod * half, abs((kronrod - gauss) * half)};
}

} // namespace detail

/**
 * Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
 *
 * The panel with the largest error estimate is bisected until the summed
 * estimate drops below max(abs_tol, rel_tol * |I|). Throws NumericalError
 * carrying the achieved error estimate when the panel budget runs out.
 */
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate(F&& f, Scalar a, Scalar b, const QuadratureOptions& opt = {})
{
    if (a == b)
        return {Scalar(0), Scalar(0), 0};

    std::vector<detail::Panel<Scalar>> panels;
    panels.reserve(64);
    panels.push_back(detail::gauss_kronrod_15<Scalar>(f, a, b));
    auto by_error = [](const auto& x, const auto& y) { return x.error < y.error; };

    Scalar value = panels.front().value;
    Scalar error = panels.front().error;
    using std::abs;
    auto tolerance = [&] {
        return std::max(static_cast<Scalar>(opt.abs_tol), static_cast<Scalar>(opt.rel_tol) * abs(value));
    };

    while (error > tolerance()) {
        if (static_cast<int>(panels.size()) >= opt.max_intervals)
            throw NumericalError("quadrature did not converge within " +
                                     std::to_string(opt.max_intervals) + " panels",
                                 static_cast<double>(error));
        std::pop_heap(panels.begin(), panels.end(), by_error);
        const auto worst = panels.back();
        panels.pop_back();
        const Scalar mid = (worst.a + worst.b) / 2;
        auto left = detail::gauss_kronrod_15<Scalar>(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15<Scalar>(f, mid, worst.b);
        panels.push_back(left);
        std::push_heap(panels.begin(), panels.end(), by_error);
        panels.push_back(right);
        std::push_heap(panels.begin(), panels.end(), by_error);

        // Re-sum from the panels to avoid drift from incremental updates.
        value = Scalar(0);
        error = Scalar(0);
        for (const auto& p : panels) {
            value += p.value;
            error += p.error;
        }
    }
    return {value, error, static_cast<int>(panels.size())};
}

} // namespace nernst

#endif // NERNST_QUADRATURE_HPP
