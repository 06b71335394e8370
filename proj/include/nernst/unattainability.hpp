#ifndef NERNST_UNATTAINABILITY_HPP
#define NERNST_UNATTAINABILITY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nernst/error.hpp"
#include "nernst/processes.hpp"
#include "nernst/quadrature.hpp"
#include "nernst/roots.hpp"
#include "nernst/spectra.hpp"
#include "nernst/thermo.hpp"

namespace nernst {

/// One adiabatic transition (T2, beta) -> (T1, alpha) checked against S1 >= S2.
template <typename Scalar = double>
struct AdiabatCheck {
    Scalar t_before{};
    std::optional<double> parameter_before;
    Scalar entropy_before{};
    Scalar t_after{};
    std::optional<double> parameter_after;
    Scalar entropy_after{};
    bool satisfied = false;
};

inline constexpr double kSecondLawTolerance = 1e-12;

template <typename Scalar>
AdiabatCheck<Scalar> second_law_check(const EntropySurface<Scalar>& before, Scalar t_before,
                                      const EntropySurface<Scalar>& after, Scalar t_after)
{
    if (!(t_before >= Scalar(0)) || !(t_after >= Scalar(0)))
        throw ArgumentError("second_law_check needs nonnegative temperatures");
    AdiabatCheck<Scalar> c;
    c.t_before = t_before;
    c.parameter_before = before.parameter();
    c.entropy_before = before.entropy(t_before);
    c.t_after = t_after;
    c.parameter_after = after.parameter();
    c.entropy_after = after.entropy(t_after);
    c.satisfied = c.entropy_after >= c.entropy_before - Scalar(kSecondLawTolerance);
    return c;
}

/**
 * Integral of C_beta(t)/t over (0, T2]. Its strict positivity is what rules
 * out an adiabat from (T2, beta) ending at T = 0 when the zero-temperature
 * entropies agree. Throws ModelError if the integral is not positive.
 */
template <typename Scalar>
Scalar forward_contradiction(const EntropySurface<Scalar>& surface, Scalar t2,
                             double quad_tol = kDefaultQuadTolerance)
{
    if (!(t2 > Scalar(0)))
        throw ArgumentError("forward_contradiction needs T2 > 0");
    QuadratureOptions options;
    options.abs_tol = quad_tol;
    const Scalar value = heat_integral(surface, t2, options).value;
    if (!(value > Scalar(0)))
        throw ModelError("heat integral is not positive; the spectrum has a single distinct energy");
    return value;
}

struct B2Options {
    double bracket_max = 1e3;
    double quad_tol = 1e-11;
    double rel_tol = 1e-13;
};

/// Start temperature T1 from which an adiabat alpha -> beta ends at T = 0.
template <typename Scalar = double>
struct B2Solution {
    /// S(0, beta) - S(0, alpha).
    Scalar delta_s0{};
    std::optional<Scalar> t1;
    Scalar residual{};
    /// A solution may exist, but only above bracket_max.
    bool bracket_exhausted = false;
    std::string note;
};

/**
 * Largest T1 in (0, bracket_max] with integral_0^T1 C_alpha/t dt = target,
 * by bisection on the (strictly increasing) heat integral.
 */
template <typename Scalar>
B2Solution<Scalar> solve_heat_integral(const EntropySurface<Scalar>& alpha, Scalar target,
                                       const B2Options& options = {})
{
    if (!(options.bracket_max > 0.0))
        throw ArgumentError("bracket_max must be positive");
    B2Solution<Scalar> out;
    out.delta_s0 = target;
    if (!(target > Scalar(0))) {
        out.note = "right-hand side is not positive; no non-negative solution";
        return out;
    }
    QuadratureOptions q;
    q.abs_tol = options.quad_tol;
    auto integral = [&](Scalar t) { return heat_integral(alpha, t, q).value; };

    const Scalar hi = static_cast<Scalar>(options.bracket_max);
    if (integral(hi) < target) {
        out.bracket_exhausted = true;
        out.note = "bracket exhausted: the heat integral stays below the target up to T = " +
                   format_number(options.bracket_max);
        return out;
    }
    const Scalar t1 = bisect_increasing([&](Scalar t) { return integral(t) - target; }, Scalar(0), hi,
                                        static_cast<Scalar>(options.rel_tol));
    const auto check = heat_integral(alpha, t1, q);
    using std::abs;
    out.t1 = t1;
    out.residual = abs(check.value - target) + check.error;
    return out;
}

/// Solves integral_0^T1 C_alpha/t dt = S(0, beta) - S(0, alpha) for T1.
template <typename Scalar>
B2Solution<Scalar> b2_solve(const EntropySurface<Scalar>& alpha, const EntropySurface<Scalar>& beta,
                            const B2Options& options = {})
{
    auto out = solve_heat_integral(alpha, beta.zero_entropy() - alpha.zero_entropy(), options);
    out.delta_s0 = beta.zero_entropy() - alpha.zero_entropy();
    if (!(out.delta_s0 > Scalar(0)))
        out.note = "S(0, beta) <= S(0, alpha): no adiabat reaches T = 0 from any start";
    return out;
}

// ---------------------------------------------------------------------------
// Deducing the heat theorem from adiabatic unattainability
// ---------------------------------------------------------------------------

/// Answers whether T = 0 at `beta` is adiabatically reachable from `alpha`.
using AttainabilityOracle = std::function<B2Solution<double>(double alpha, double beta)>;

struct PairFinding {
    double alpha = 0.0;
    double beta = 0.0;
    B2Solution<double> solution;
};

struct NernstDeduction {
    bool holds = false;
    /// Ordered pairs from which T = 0 is reachable (alpha -> beta).
    std::vector<PairFinding> attainable;
    /// Pairs with a positive right-hand side but no solution inside the bracket.
    std::vector<PairFinding> undetermined;
    /// Pairs that were unattainable both ways yet have different S(0).
    std::vector<PairFinding> inconsistent;
};

struct DeduceOptions {
    double surface_t_max = 10.0;
    TruncationOptions truncation{};
    B2Options b2{};
};

/// b2_solve on surfaces of `model`, truncated at options.surface_t_max.
AttainabilityOracle b2_oracle(const SpectrumModel& model, const DeduceOptions& options = {});

NernstDeduction deduce_nernst(const SpectrumModel& model, std::span<const double> grid,
                              const AttainabilityOracle& oracle);

NernstDeduction deduce_nernst(const SpectrumModel& model, std::span<const double> grid,
                              const DeduceOptions& options = {});

// ---------------------------------------------------------------------------
// Randomized equivalence harness
// ---------------------------------------------------------------------------

struct RandomPair {
    std::size_t id = 0;
    Spectrum<double> first;
    Spectrum<double> second;
    /// Energy scale factor (> 1) used to build the compressed staircase curve.
    double compression = 2.0;
};

/// Random spectrum: 2-20 levels, gaps in [0.1, 10], ground degeneracy in {1, 2, 4}.
Spectrum<double> random_spectrum(Rng& rng, std::optional<int> ground_degeneracy = std::nullopt);

/// Pair `id` of the stream keyed by `seed`.
RandomPair random_pair(std::uint64_t seed, std::size_t id);

/// Pair with equal ground degeneracies (the heat theorem holds across it).
RandomPair random_nernst_pair(std::uint64_t seed, std::size_t id);

struct HarnessOptions {
    std::size_t max_steps = 10000;
    B2Options b2{};
    unsigned workers = 0;
};

struct HarnessRow {
    std::size_t model_id = 0;
    bool nernst_holds = false;
    B2Solution<double> b2_forward;
    B2Solution<double> b2_reverse;
    bool staircase_reached_zero = false;
    std::size_t steps = 0;
    /// log10 of the final staircase temperature (-inf when it reached 0).
    double log10_final_temperature = 0.0;
    bool counterexample = false;
    std::string detail;
    std::string description;
};

/// Checks one pair in both directions (see HarnessReport).
HarnessRow classify_pair(const RandomPair& pair, const HarnessOptions& options = {});

/// Staircase between A and A compressed by `compression`, in extended precision.
StaircaseResult<long double> nernst_staircase(const Spectrum<double>& a, double compression,
                                              std::size_t max_steps);

/// Staircase from the higher-S(0) curve onto the lower-S(0) curve, started at
/// the highest power-of-two temperature T0 <= 8 below which the curves are ordered.
StaircaseResult<long double> violating_staircase(const Spectrum<double>& high, const Spectrum<double>& low,
                                                 std::size_t max_steps);

/**
 * Aggregate of classify_pair over random pairs.
 *
 * A pair where the heat theorem holds must have no b2 solution either way and
 * a staircase (to T = 0) that never finishes within the step budget. A pair
 * where it fails must have a b2 solution or bracket note in the direction of
 * increasing S(0), none in the other, and a staircase that lands on T = 0.
 * Anything else is a counterexample.
 */
struct HarnessReport {
    std::vector<HarnessRow> rows;
    std::size_t counterexamples = 0;
    std::size_t nernst_pairs = 0;
    std::size_t violating_pairs = 0;
    std::size_t b2_solutions = 0;
    std::size_t bracket_notes = 0;
    std::size_t reached_zero = 0;
    std::size_t max_steps_to_zero = 0;

    void write_csv(std::ostream& os) const;
    void write_summary(std::ostream& os) const;
};

HarnessReport summarize(std::vector<HarnessRow> rows);

HarnessReport equivalence_harness(std::size_t n_models, std::uint64_t seed,
                                  const HarnessOptions& options = {});

} // namespace nernst

#endif // NERNST_UNATTAINABILITY_HPP
