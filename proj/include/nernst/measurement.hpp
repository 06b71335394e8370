#ifndef NERNST_MEASUREMENT_HPP
#define NERNST_MEASUREMENT_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "nernst/error.hpp"
#include "nernst/parallel.hpp"
#include "nernst/rng.hpp"
#include "nernst/spectra.hpp"
#include "nernst/thermo.hpp"

namespace nernst {

/**
 * Pure state in the energy eigenbasis of a truncated spectrum. A g-fold
 * degenerate level owns g consecutive amplitudes.
 */
template <typename Scalar = double>
struct StateVector {
    Vector<std::complex<Scalar>> amplitudes;
    Spectrum<Scalar> spectrum;
};

/// First microstate index of every level, plus the total as the last entry.
template <typename Scalar>
std::vector<Index> level_offsets(const Spectrum<Scalar>& s)
{
    std::vector<Index> offsets(static_cast<std::size_t>(s.size()) + 1, 0);
    for (Index i = 0; i < s.size(); ++i)
        offsets[static_cast<std::size_t>(i) + 1] = offsets[static_cast<std::size_t>(i)] + s.degeneracies(i);
    return offsets;
}

template <typename Scalar>
void validate(const StateVector<Scalar>& state)
{
    validate(state.spectrum);
    if (state.amplitudes.size() != state.spectrum.microstates())
        throw ValidationError("amplitude count does not match the number of microstates");
    using std::abs;
    if (abs(state.amplitudes.squaredNorm() - Scalar(1)) > Scalar(kNormalizationTolerance))
        throw ValidationError("state vector is not normalized");
}

/// `microstate`-th basis vector of `level`.
template <typename Scalar>
StateVector<Scalar> eigenstate(const Spectrum<Scalar>& s, Index level, Index microstate = 0)
{
    if (level < 0 || level >= s.size() || microstate < 0 || microstate >= s.degeneracies(level))
        throw ArgumentError("eigenstate index out of range");
    StateVector<Scalar> psi{Vector<std::complex<Scalar>>::Zero(s.microstates()), s};
    psi.amplitudes(level_offsets(s)[static_cast<std::size_t>(level)] + microstate) = Scalar(1);
    return psi;
}

/// Projector onto the eigenspace of one energy level.
struct EnergyProjector {
    Index level = 0;
    Index offset = 0;
    Index dimension = 1;

    /// P|psi>, unnormalized.
    template <typename Scalar>
    Vector<std::complex<Scalar>> apply(const Vector<std::complex<Scalar>>& psi) const
    {
        Vector<std::complex<Scalar>> out = Vector<std::complex<Scalar>>::Zero(psi.size());
        out.segment(offset, dimension) = psi.segment(offset, dimension);
        return out;
    }

    /// <psi|P|psi>.
    template <typename Scalar>
    Scalar expectation(const Vector<std::complex<Scalar>>& psi) const
    {
        return psi.segment(offset, dimension).squaredNorm();
    }
};

/// One projector per level; together they resolve the identity.
template <typename Scalar>
std::vector<EnergyProjector> energy_projectors(const Spectrum<Scalar>& s)
{
    const auto offsets = level_offsets(s);
    std::vector<EnergyProjector> out;
    out.reserve(static_cast<std::size_t>(s.size()));
    for (Index i = 0; i < s.size(); ++i)
        out.push_back({i, offsets[static_cast<std::size_t>(i)], s.degeneracies(i)});
    return out;
}

template <typename Scalar>
Vector<Scalar> born_probabilities(const StateVector<Scalar>& state)
{
    validate(state);
    const auto projectors = energy_projectors(state.spectrum);
    Vector<Scalar> q(state.spectrum.size());
    for (const auto& p : projectors)
        q(p.level) = p.expectation(state.amplitudes);
    return q;
}

/// Energy-diagonal states are measured through their populations.
template <typename Scalar>
Vector<Scalar> born_probabilities(const ThermalState<Scalar>& state)
{
    validate(state);
    return state.populations;
}

/// P_i|psi> / sqrt(<psi|P_i|psi>).
template <typename Scalar>
StateVector<Scalar> project(const StateVector<Scalar>& state, Index level)
{
    validate(state);
    if (level < 0 || level >= state.spectrum.size())
        throw ArgumentError("projection level out of range");
    const EnergyProjector p = energy_projectors(state.spectrum)[static_cast<std::size_t>(level)];
    const Scalar weight = p.expectation(state.amplitudes);
    if (!(weight > Scalar(0)))
        throw ProjectionError("outcome " + std::to_string(level) + " has zero probability");
    using std::sqrt;
    return {p.apply(state.amplitudes) / sqrt(weight), state.spectrum};
}

/// Uniform mixture over the microstates of `level`: the post-measurement
/// state of an energy-diagonal input.
template <typename Scalar>
ThermalState<Scalar> collapse_to_level(const Spectrum<Scalar>& s, Index level)
{
    ThermalState<Scalar> out{Vector<Scalar>::Zero(s.size()), s, std::nullopt};
    out.populations(level) = Scalar(1);
    if (level == 0)
        out.temperature = Scalar(0);
    return out;
}

template <typename Scalar = double>
struct MeasurementRecord {
    Index outcome = 0;
    Scalar energy{};
    Scalar probability{};
    /// Projected pure state, or the level mixture for energy-diagonal input.
    std::variant<StateVector<Scalar>, ThermalState<Scalar>> post;
    /// 0 exactly when the ground level was found, otherwise unset.
    std::optional<Scalar> temperature;
    Scalar entropy_before{};
    Scalar entropy_after{};

    /// Post-measurement level populations.
    ThermalState<Scalar> level_view() const
    {
        if (const auto* thermal = std::get_if<ThermalState<Scalar>>(&post))
            return *thermal;
        const auto& psi = std::get<StateVector<Scalar>>(post);
        return {born_probabilities(psi), psi.spectrum, temperature};
    }
};

namespace detail {

template <typename Scalar>
Index draw_outcome(const Vector<Scalar>& q, Rng& rng)
{
    const double u = rng.uniform();
    double cumulative = 0.0;
    Index last = -1;
    for (Index i = 0; i < q.size(); ++i) {
        if (!(q(i) > Scalar(0)))
            continue;
        last = i;
        cumulative += static_cast<double>(q(i));
        if (u < cumulative)
            return i;
    }
    return last;
}

} // namespace detail

/// Born-rule outcome and collapse for a pure state. Pure states carry zero
/// entropy before and after.
template <typename Scalar>
MeasurementRecord<Scalar> sample_measurement(const StateVector<Scalar>& state, Rng& rng)
{
    const Vector<Scalar> q = born_probabilities(state);
    const Index k = detail::draw_outcome(q, rng);
    MeasurementRecord<Scalar> rec;
    rec.outcome = k;
    rec.energy = state.spectrum.energies(k);
    rec.probability = q(k);
    rec.post = project(state, k);
    if (k == 0)
        rec.temperature = Scalar(0);
    return rec;
}

template <typename Scalar>
MeasurementRecord<Scalar> sample_measurement(const ThermalState<Scalar>& state, Rng& rng)
{
    const Vector<Scalar> q = born_probabilities(state);
    const Index k = detail::draw_outcome(q, rng);
    MeasurementRecord<Scalar> rec;
    rec.outcome = k;
    rec.energy = state.spectrum.energies(k);
    rec.probability = q(k);
    auto post = collapse_to_level(state.spectrum, k);
    rec.entropy_before = entropy(state);
    rec.entropy_after = entropy(post);
    rec.temperature = post.temperature;
    rec.post = std::move(post);
    return rec;
}

template <typename State>
auto sample_measurement(const State& state, std::uint64_t seed)
{
    Rng rng(seed);
    return sample_measurement(state, rng);
}

struct TrialOutcome {
    std::size_t trial = 0;
    Index outcome_level = 0;
    double outcome_energy = 0.0;
    double post_entropy = 0.0;
};

struct GroundAttainmentReport {
    std::size_t trials = 0;
    std::size_t ground_hits = 0;
    double frequency = 0.0;
    /// Exact Born value g_0 / Z.
    double q0_exact = 0.0;
    double sigma = 0.0;
    /// q0_exact -+ 3 sigma.
    double band_low = 0.0;
    double band_high = 0.0;
    bool within_band = false;
    /// Wilson score interval (z = 3) around the empirical frequency.
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    /// q0 over the temperature grid, and whether it decreases strictly.
    std::vector<std::pair<double, double>> q0_table;
    bool q0_strictly_decreasing = true;
    std::vector<TrialOutcome> outcomes;
};

/// Thermal (energy-diagonal) ensemble of sampled measurements on Gibbs(T).
/// Trial i uses the stream Rng(seed).split(i).
GroundAttainmentReport ground_state_attainment(const SpectrumModel& model, double x, double t,
                                               std::size_t n_trials, std::uint64_t seed,
                                               std::vector<double> t_grid = {},
                                               const TruncationOptions& truncation = {},
                                               unsigned workers = 0);

struct EntropyReductionReport {
    double entropy_pre = 0.0;
    double mean_entropy_post = 0.0;
    double drop = 0.0;
    /// mean post <= pre.
    bool reduced = false;
    /// mean post < pre.
    bool strictly_reduced = false;
};

template <typename Scalar>
EntropyReductionReport entropy_reduction(const ThermalState<Scalar>& pre,
                                         const std::vector<MeasurementRecord<Scalar>>& records)
{
    EntropyReductionReport r;
    r.entropy_pre = static_cast<double>(entropy(pre));
    double total = 0.0;
    for (const auto& rec : records)
        total += static_cast<double>(rec.entropy_after);
    r.mean_entropy_post = records.empty() ? 0.0 : total / static_cast<double>(records.size());
    r.drop = r.entropy_pre - r.mean_entropy_post;
    r.reduced = r.mean_entropy_post <= r.entropy_pre;
    r.strictly_reduced = r.mean_entropy_post < r.entropy_pre;
    return r;
}

} // namespace nernst

#endif // NERNST_MEASUREMENT_HPP
