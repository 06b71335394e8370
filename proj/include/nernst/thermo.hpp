#ifndef NERNST_THERMO_HPP
#define NERNST_THERMO_HPP

#include <cmath>
#include <limits>
#include <optional>

#include "nernst/error.hpp"
#include "nernst/quadrature.hpp"
#include "nernst/spectra.hpp"

namespace nernst {

/**
 * Level populations over a truncated spectrum.
 *
 * `populations(i)` is the total probability of level i, degeneracy included.
 * `temperature` is set only when the populations are known to be Gibbs at
 * that temperature (0 meaning all mass on the ground level).
 */
template <typename Scalar = double>
struct ThermalState {
    Vector<Scalar> populations;
    Spectrum<Scalar> spectrum;
    std::optional<Scalar> temperature;

    Index size() const { return populations.size(); }
};

inline constexpr double kNormalizationTolerance = 1e-12;

template <typename Scalar>
void validate(const ThermalState<Scalar>& state)
{
    validate(state.spectrum);
    if (state.populations.size() != state.spectrum.size())
        throw ValidationError("population vector does not match the spectrum size");
    if ((state.populations.array() < Scalar(0)).any())
        throw ValidationError("populations must be nonnegative");
    using std::abs;
    if (abs(state.populations.sum() - Scalar(1)) > Scalar(kNormalizationTolerance))
        throw ValidationError("populations must sum to 1");
    if (state.temperature && *state.temperature < Scalar(0))
        throw ValidationError("temperature label must be nonnegative");
}

namespace detail {

template <typename Scalar>
void require_positive_temperature(Scalar t, const char* what)
{
    if (!(t > Scalar(0)))
        throw ArgumentError(std::string(what) + " needs T > 0");
}

// g_i exp(-E_i / T); the ground term is exactly g_0 since E_0 = 0.
template <typename Scalar>
Vector<Scalar> boltzmann_weights(const Spectrum<Scalar>& s, Scalar t)
{
    using std::exp;
    Vector<Scalar> w(s.size());
    for (Index i = 0; i < s.size(); ++i)
        w(i) = static_cast<Scalar>(s.degeneracies(i)) * exp(-s.energies(i) / t);
    return w;
}

} // namespace detail

/// Z = sum_i g_i exp(-E_i / T) for T > 0.
template <typename Scalar>
Scalar partition_function(const Spectrum<Scalar>& s, Scalar t)
{
    detail::require_positive_temperature(t, "partition_function");
    return detail::boltzmann_weights(s, t).sum();
}

/// Gibbs populations at T >= 0. T = 0 puts all mass on the ground level.
template <typename Scalar>
ThermalState<Scalar> gibbs_populations(const Spectrum<Scalar>& s, Scalar t)
{
    if (!(t >= Scalar(0)))
        throw ArgumentError("gibbs_populations needs T >= 0");
    ThermalState<Scalar> state{Vector<Scalar>::Zero(s.size()), s, t};
    if (t == Scalar(0)) {
        state.populations(0) = Scalar(1);
        return state;
    }
    const Vector<Scalar> w = detail::boltzmann_weights(s, t);
    state.populations = w / w.sum();
    return state;
}

/// Degeneracy-resolved Gibbs entropy, S = -sum_i p_i ln(p_i / g_i).
template <typename Scalar>
Scalar entropy(const ThermalState<Scalar>& state)
{
    using std::log;
    Scalar s(0);
    for (Index i = 0; i < state.size(); ++i) {
        const Scalar p = state.populations(i);
        if (p > Scalar(0))
            s += p * (log(static_cast<Scalar>(state.spectrum.degeneracies(i))) - log(p));
    }
    return s;
}

/// Mean energy of a population vector.
template <typename Scalar>
Scalar mean_energy(const ThermalState<Scalar>& state)
{
    return state.populations.dot(state.spectrum.energies);
}

/// C(T) = Var(E) / T^2 of the Gibbs state at T > 0.
template <typename Scalar>
Scalar specific_heat(const Spectrum<Scalar>& s, Scalar t)
{
    detail::require_positive_temperature(t, "specific_heat");
    const Vector<Scalar> p = gibbs_populations(s, t).populations;
    const Vector<Scalar> x = s.energies / t;
    const Scalar mean = p.dot(x);
    return (p.array() * (x.array() - mean).square()).sum();
}

/**
 * S(T) for one fixed truncated spectrum, with its zero-temperature value
 * S0 = ln g_0.
 *
 * Besides S itself the surface exposes ln(S(T) - S0), evaluated without
 * forming S - S0, so that entropies far below the rounding floor of S0 can
 * still be compared. This matters for staircase runs that push T towards
 * the underflow limit of the scalar type.
 */
template <typename Scalar = double>
class EntropySurface {
public:
    explicit EntropySurface(Spectrum<Scalar> spectrum,
                            double t_max = std::numeric_limits<double>::infinity())
        : spectrum_(std::move(spectrum)), t_max_(t_max)
    {
        validate(spectrum_);
        using std::log;
        s0_ = log(static_cast<Scalar>(spectrum_.ground_degeneracy()));
        log_weights_.resize(spectrum_.size());
        for (Index i = 0; i < spectrum_.size(); ++i)
            log_weights_(i) = log(static_cast<Scalar>(spectrum_.degeneracies(i))) - s0_;
    }

    /// Surface of `model` at `x`, truncated so that it is accurate up to `t_max`.
    static EntropySurface from_model(const SpectrumModel& model, double x, double t_max,
                                     const TruncationOptions& options = {})
    {
        return EntropySurface(truncated_levels<Scalar>(model, x, t_max, options), t_max);
    }

    const Spectrum<Scalar>& spectrum() const { return spectrum_; }
    std::optional<double> parameter() const { return spectrum_.parameter; }
    /// Highest temperature the truncation was chosen for.
    double t_max() const { return t_max_; }

    Scalar zero_entropy() const { return s0_; }

    Scalar entropy(Scalar t) const
    {
        using std::exp;
        return t > Scalar(0) ? s0_ + exp(log_excess(t)) : s0_;
    }

    /// ln(S(T) - S0); -infinity at T = 0 or for a single-level spectrum.
    Scalar log_excess(Scalar t) const
    {
        using std::exp;
        using std::log;
        using std::log1p;
        const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
        const Index n = spectrum_.size();
        if (!(t > Scalar(0)) || n < 2)
            return neg_inf;

        // lw_i = ln(g_i / g_0) - E_i / T for the excited levels.
        Scalar a = neg_inf;
        for (Index i = 1; i < n; ++i) {
            const Scalar lw = log_weights_(i) - spectrum_.energies(i) / t;
            a = lw > a ? lw : a;
        }
        if (a == neg_inf)
            return neg_inf;

        // Terms below e^-80 relative to the largest are invisible at any
        // supported precision and are skipped.
        const Scalar cutoff(-80);
        Scalar sum(0);
        Scalar moment(0);
        for (Index i = 1; i < n; ++i) {
            const Scalar x = spectrum_.energies(i) / t;
            const Scalar shifted = log_weights_(i) - x - a;
            if (shifted < cutoff)
                continue;
            const Scalar term = exp(shifted);
            sum += term;
            moment += term * x;
        }
        // S - S0 = ln(1 + eps) + <x>, eps = e^a * sum, <x> = e^a * moment / (1 + eps).
        const Scalar eps = exp(a) * sum;
        const Scalar log1p_ratio = eps > Scalar(0) ? log1p(eps) / eps : Scalar(1);
        return a + log(sum * log1p_ratio + moment / (Scalar(1) + eps));
    }

    Scalar heat_capacity(Scalar t) const { return specific_heat(spectrum_, t); }

private:
    Spectrum<Scalar> spectrum_;
    Vector<Scalar> log_weights_;
    Scalar s0_{};
    double t_max_;
};

inline constexpr double kDefaultQuadTolerance = 1e-9;

/**
 * Integral of C(t)/t over (0, T], evaluated in u = ln t.
 *
 * The lower end is cut at the point where the integrand has fallen below
 * 1e-18 (relative to its value at min(T, gap/3) when that is smaller than 1).
 * Below the first gap the integrand decays like exp(-gap/t), so the neglected
 * piece is below the cutoff value itself.
 */
template <typename Scalar>
QuadratureResult<Scalar> heat_integral(const EntropySurface<Scalar>& surface, Scalar t,
                                       QuadratureOptions options = {})
{
    if (!(t >= Scalar(0)))
        throw ArgumentError("heat_integral needs T >= 0");
    const auto& spectrum = surface.spectrum();
    if (t == Scalar(0) || spectrum.size() < 2)
        return {};

    auto integrand_t = [&](Scalar s) { return specific_heat(spectrum, s) / s; };
    Scalar lower = std::min(t, spectrum.first_gap() / Scalar(3));
    const Scalar reference = integrand_t(lower);
    if (!(reference > Scalar(0)))
        return {};
    const Scalar threshold = Scalar(1e-18) * std::min(Scalar(1), reference);
    for (int i = 0; i < 4096 && integrand_t(lower) >= threshold; ++i)
        lower /= Scalar(2);

    using std::exp;
    using std::log;
    auto integrand_u = [&](Scalar u) { return specific_heat(spectrum, exp(u)); };
    return integrate<Scalar>(integrand_u, log(lower), log(t), options);
}

/// S0 + integral of C(t)/t from 0 to T.
template <typename Scalar>
Scalar entropy_via_integral(const EntropySurface<Scalar>& surface, Scalar t,
                            double quad_tol = kDefaultQuadTolerance)
{
    if (!(quad_tol > 0.0))
        throw ArgumentError("quad_tol must be positive");
    QuadratureOptions options;
    options.abs_tol = quad_tol;
    return surface.zero_entropy() + heat_integral(surface, t, options).value;
}

struct NernstReport {
    bool holds = false;
    double zero_entropy_1 = 0.0;
    double zero_entropy_2 = 0.0;
};

/// Zero-temperature entropies ln g_0 at two parameters, and whether they agree.
NernstReport nernst_check(const SpectrumModel& model, double x1, double x2);

/// True iff the ground level at x is nondegenerate, i.e. S(0, x) = 0.
bool planck_check(const SpectrumModel& model, double x);

} // namespace nernst

#endif // NERNST_THERMO_HPP
