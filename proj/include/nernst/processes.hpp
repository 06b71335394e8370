#ifndef NERNST_PROCESSES_HPP
#define NERNST_PROCESSES_HPP

#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "nernst/csv.hpp"
#include "nernst/error.hpp"
#include "nernst/measurement.hpp"
#include "nernst/roots.hpp"
#include "nernst/spectra.hpp"
#include "nernst/thermo.hpp"

namespace nernst {

struct AdiabaticStep {
    double parameter = 0.0;
};
struct IsothermalStep {
    double parameter = 0.0;
};
struct ThermalizeStep {
    double temperature = 0.0;
};
struct MeasureStep {
    std::uint64_t seed = 0;
};

using ProtocolStep = std::variant<AdiabaticStep, IsothermalStep, ThermalizeStep, MeasureStep>;

enum class StepKind { Initial, Adiabatic, Isothermal, Thermalize, Measure };

inline const char* to_string(StepKind k)
{
    switch (k) {
    case StepKind::Initial: return "initial";
    case StepKind::Adiabatic: return "adiabatic";
    case StepKind::Isothermal: return "isothermal";
    case StepKind::Thermalize: return "thermalize";
    case StepKind::Measure: return "measure";
    }
    return "unknown";
}

/// Heat is absorbed by the system; work is done on it. heat + work = dU.
template <typename Scalar = double>
struct TraceRecord {
    std::size_t step_index = 0;
    StepKind kind = StepKind::Initial;
    std::optional<double> parameter;
    std::optional<Scalar> temperature;
    Scalar entropy{};
    Scalar heat{};
    Scalar work{};
};

template <typename Scalar = double>
struct ProtocolTrace {
    std::vector<TraceRecord<Scalar>> records;

    const TraceRecord<Scalar>& back() const { return records.back(); }
    std::size_t size() const { return records.size(); }
};

/// CSV with header step_index,kind,parameter,temperature,entropy,heat,work.
template <typename Scalar>
void write_trace_csv(std::ostream& os, const ProtocolTrace<Scalar>& trace)
{
    write_row(os, {"step_index", "kind", "parameter", "temperature", "entropy", "heat", "work"});
    for (const auto& r : trace.records)
        write_row(os, {format_number(r.step_index), to_string(r.kind), format_optional(r.parameter),
                       format_optional(r.temperature), format_number(r.entropy),
                       format_number(r.heat), format_number(r.work)});
}

/// Factor s with target = s * source, if the two spectra are exact rescalings
/// (relative tolerance 1e-12 per level, identical degeneracies).
template <typename Scalar>
std::optional<Scalar> exact_scale(const Spectrum<Scalar>& source, const Spectrum<Scalar>& target)
{
    if (source.size() != target.size() || source.size() < 2 || source.degeneracies != target.degeneracies)
        return std::nullopt;
    const Scalar s = target.energies(1) / source.energies(1);
    using std::abs;
    for (Index i = 1; i < source.size(); ++i) {
        if (abs(target.energies(i) - s * source.energies(i)) > Scalar(1e-12) * abs(target.energies(i)))
            return std::nullopt;
    }
    return s;
}

/// Diagnostic temperature from the first two level populations,
/// -E_1 / ln((p_1/g_1)/(p_0/g_0)). For reporting only; not a Gibbs label.
template <typename Scalar>
std::optional<Scalar> ratio_temperature(const ThermalState<Scalar>& state)
{
    if (state.size() < 2)
        return std::nullopt;
    const auto& s = state.spectrum;
    const Scalar p0 = state.populations(0) / static_cast<Scalar>(s.degeneracies(0));
    const Scalar p1 = state.populations(1) / static_cast<Scalar>(s.degeneracies(1));
    if (!(p0 > Scalar(0)))
        return std::nullopt;
    if (p1 == Scalar(0))
        return Scalar(0);
    using std::log;
    const Scalar r = log(p1 / p0);
    if (!(r < Scalar(0)))
        return std::nullopt;
    return -s.energies(1) / r;
}

namespace detail {

template <typename Scalar>
bool all_on_ground(const ThermalState<Scalar>& state)
{
    return state.populations(0) == Scalar(1) &&
           (state.populations.tail(state.size() - 1).array() == Scalar(0)).all();
}

} // namespace detail

/**
 * Quasi-static adiabatic change of the spectrum: level populations are
 * carried over unchanged. The result is labelled Gibbs at s*T only when the
 * target is an exact rescaling by s of a Gibbs(T) source; a ground-state
 * input stays at T = 0. Otherwise the label is cleared.
 */
template <typename Scalar>
ThermalState<Scalar> apply_adiabatic(const ThermalState<Scalar>& state, const Spectrum<Scalar>& target)
{
    validate(state);
    validate(target);
    if (target.size() != state.size() || target.degeneracies != state.spectrum.degeneracies)
        throw StructureError("adiabatic step needs identical level counts and degeneracies");

    ThermalState<Scalar> out{state.populations, target, std::nullopt};
    if (detail::all_on_ground(state)) {
        out.temperature = Scalar(0);
    } else if (state.temperature) {
        if (auto s = exact_scale(state.spectrum, target))
            out.temperature = *state.temperature * *s;
    }
    return out;
}

template <typename Scalar = double>
ThermalState<Scalar> apply_adiabatic(const ThermalState<Scalar>& state, const SpectrumModel& model,
                                     double target)
{
    return apply_adiabatic(state, model.levels<Scalar>(target, state.size()));
}

/// Re-thermalization on the target spectrum at the bath temperature.
template <typename Scalar>
ThermalState<Scalar> apply_isothermal(const ThermalState<Scalar>& state, const Spectrum<Scalar>& target,
                                      Scalar bath_temperature)
{
    validate(state);
    if (!(bath_temperature >= Scalar(0)))
        throw ArgumentError("bath temperature must be >= 0");
    return gibbs_populations(target, bath_temperature);
}

template <typename Scalar = double>
ThermalState<Scalar> apply_isothermal(const ThermalState<Scalar>& state, const SpectrumModel& model,
                                      double target, Scalar bath_temperature)
{
    return apply_isothermal(state, model.levels<Scalar>(target, state.size()), bath_temperature);
}

/// Q = T dS for an isothermal record.
template <typename Scalar>
Scalar isothermal_heat(const ThermalState<Scalar>& before, const ThermalState<Scalar>& after,
                       Scalar bath_temperature)
{
    return bath_temperature * (entropy(after) - entropy(before));
}

// ---------------------------------------------------------------------------
// Staircase on entropy surfaces
// ---------------------------------------------------------------------------

struct StaircaseOptions {
    /// Relative tolerance on T for the adiabatic solve.
    double root_rel_tol = 1e-12;
    /// Points of the log grid used to check the curve ordering.
    int ordering_points = 64;
    /// Lower end of the ordering grid when the target temperature is 0.
    double ordering_floor = 1e-6;
    bool record_trace = true;
};

template <typename Scalar = double>
struct StaircaseRound {
    std::size_t index = 0;
    Scalar t_start{};
    /// Entropy on curve B after the isothermal leg.
    Scalar entropy_isothermal{};
    Scalar t_end{};
};

template <typename Scalar = double>
struct StaircaseResult {
    std::size_t steps = 0;
    bool reached_zero = false;
    /// final temperature <= target temperature.
    bool reached_target = false;
    Scalar final_temperature{};
    std::vector<StaircaseRound<Scalar>> rounds;
    ProtocolTrace<Scalar> trace;
};

namespace detail {

// S_b(tb) < S_a(ta), decided on (S0, ln excess) so that entropies below the
// rounding floor of S0 still compare correctly.
template <typename Scalar>
bool entropy_less(const EntropySurface<Scalar>& b, Scalar tb, const EntropySurface<Scalar>& a, Scalar ta)
{
    if (b.zero_entropy() == a.zero_entropy())
        return b.log_excess(tb) < a.log_excess(ta);
    return b.entropy(tb) < a.entropy(ta);
}

template <typename Scalar>
Scalar internal_energy(const EntropySurface<Scalar>& surface, Scalar t)
{
    return mean_energy(gibbs_populations(surface.spectrum(), t));
}

} // namespace detail

/// Throws ProtocolError unless S_B(T) < S_A(T) on a log grid over (lo, t0].
template <typename Scalar>
void check_curve_ordering(const EntropySurface<Scalar>& a, const EntropySurface<Scalar>& b, Scalar lo,
                          Scalar t0, int points = 64)
{
    using std::exp;
    using std::log;
    lo = std::min(lo, t0);
    const Scalar step = points > 1 ? (log(t0) - log(lo)) / Scalar(points - 1) : Scalar(0);
    for (int i = 0; i < points; ++i) {
        const Scalar t = i + 1 == points ? t0 : exp(log(lo) + step * Scalar(i));
        if (!detail::entropy_less(b, t, a, t))
            throw ProtocolError("staircase curves are not ordered (S_B < S_A fails at T = " +
                                format_number(t) + ")");
    }
}

/**
 * Alternating isothermal (A -> B at fixed T) and reversible adiabatic
 * (B -> A at fixed S) legs in the (T, S) plane.
 *
 * The adiabatic leg lands exactly at T = 0 when S_B(T) <= S_A(0), which can
 * only happen if S_B(0) < S_A(0). Otherwise S_A(T') = S_B(T) is solved on a
 * bracket inside (0, T) in the variable 1/T'. The loop stops once
 * T <= t_target or after max_steps rounds.
 */
template <typename Scalar>
StaircaseResult<Scalar> staircase(const EntropySurface<Scalar>& a, const EntropySurface<Scalar>& b,
                                  Scalar t0, Scalar t_target, std::size_t max_steps,
                                  const StaircaseOptions& options = {})
{
    if (!(t0 > Scalar(0)))
        throw ArgumentError("staircase needs T0 > 0");
    if (!(t_target >= Scalar(0)) || !(t_target < t0))
        throw ArgumentError("staircase needs 0 <= T_target < T0");
    if (max_steps < 1)
        throw ArgumentError("staircase needs max_steps >= 1");
    const Scalar floor = t_target > Scalar(0) ? t_target : static_cast<Scalar>(options.ordering_floor);
    check_curve_ordering(a, b, floor, t0, options.ordering_points);

    using std::exp;
    using std::log;
    const Scalar rel_tol = static_cast<Scalar>(options.root_rel_tol);
    const bool same_floor = a.zero_entropy() == b.zero_entropy();

    StaircaseResult<Scalar> result;
    if (options.record_trace) {
        result.trace.records.push_back(
            {0, StepKind::Initial, a.parameter(), t0, a.entropy(t0), Scalar(0), Scalar(0)});
    }

    Scalar t = t0;
    for (std::size_t step = 1; step <= max_steps && t > t_target; ++step) {
        const Scalar s_iso = b.entropy(t);
        const Scalar le_b = b.log_excess(t);

        // Target excess over S_A(0) for the adiabatic leg, as a logarithm.
        std::optional<Scalar> target_log;
        if (same_floor) {
            target_log = le_b;
        } else {
            const Scalar d = b.zero_entropy() - a.zero_entropy() + exp(le_b);
            if (d > Scalar(0))
                target_log = log(d);
        }

        Scalar t_next(0);
        if (target_log) {
            const Scalar level = *target_log;
            Scalar lo = t / Scalar(2);
            for (int i = 0; a.log_excess(lo) >= level; ++i) {
                lo /= Scalar(2);
                if (!(lo > Scalar(0)) || i > 100000)
                    throw NumericalError("staircase: adiabatic bracket underflowed", static_cast<double>(t));
            }
            auto f = [&](Scalar u) { return level - a.log_excess(Scalar(1) / u); };
            const Scalar u_lo = Scalar(1) / t;
            const Scalar u_hi = Scalar(1) / lo;
            const Scalar f_lo = f(u_lo);
            if (!(f_lo < Scalar(0)))
                throw ProtocolError("staircase: isothermal leg did not lower the entropy");
            const Scalar u = illinois_increasing(f, u_lo, f_lo, u_hi, f(u_hi), rel_tol);
            t_next = Scalar(1) / u;
            if (!(t_next < t))
                throw NumericalError("staircase: adiabatic leg did not cool", static_cast<double>(t));
        }

        if (options.record_trace) {
            const Scalar u_a = detail::internal_energy(a, t);
            const Scalar u_b = detail::internal_energy(b, t);
            const Scalar heat = t * (s_iso - a.entropy(t));
            result.trace.records.push_back(
                {2 * step - 1, StepKind::Isothermal, b.parameter(), t, s_iso, heat, u_b - u_a - heat});
            const Scalar u_end = detail::internal_energy(a, t_next);
            result.trace.records.push_back(
                {2 * step, StepKind::Adiabatic, a.parameter(), t_next, s_iso, Scalar(0), u_end - u_b});
        }
        result.rounds.push_back({step, t, s_iso, t_next});
        t = t_next;
        result.steps = step;
    }

    result.final_temperature = t;
    result.reached_zero = t == Scalar(0);
    result.reached_target = t <= t_target;
    return result;
}

// ---------------------------------------------------------------------------
// Step sequencer
// ---------------------------------------------------------------------------

/// Thrown by run_protocol when a step fails; carries the trace up to that step.
template <typename Scalar = double>
class ProtocolAborted : public Error {
public:
    ProtocolAborted(const std::string& what, ProtocolTrace<Scalar> partial, std::size_t failed_step,
                    std::exception_ptr cause)
        : Error(what), partial_(std::move(partial)), failed_step_(failed_step), cause_(cause)
    {
    }

    const ProtocolTrace<Scalar>& partial_trace() const { return partial_; }
    std::size_t failed_step() const { return failed_step_; }
    std::exception_ptr cause() const { return cause_; }

private:
    ProtocolTrace<Scalar> partial_;
    std::size_t failed_step_;
    std::exception_ptr cause_;
};

template <typename Scalar = double>
struct ProtocolRun {
    ProtocolTrace<Scalar> trace;
    ThermalState<Scalar> final_state;
};

/**
 * Applies `steps` in order starting from `initial`. Adiabatic and isothermal
 * steps regenerate the spectrum from `model` with the initial level count.
 * An isothermal step runs at the temperature label of the current state.
 */
template <typename Scalar = double>
ProtocolRun<Scalar> run_protocol(const SpectrumModel& model, const ThermalState<Scalar>& initial,
                                 const std::vector<ProtocolStep>& steps)
{
    validate(initial);
    ProtocolRun<Scalar> run{{}, initial};
    auto& trace = run.trace;
    auto& state = run.final_state;
    trace.records.push_back({0, StepKind::Initial, initial.spectrum.parameter, initial.temperature,
                             entropy(initial), Scalar(0), Scalar(0)});

    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::size_t index = i + 1;
        try {
            const Scalar s_before = entropy(state);
            const Scalar u_before = mean_energy(state);
            TraceRecord<Scalar> rec;
            rec.step_index = index;
            std::visit(
                [&](const auto& step) {
                    using T = std::decay_t<decltype(step)>;
                    if constexpr (std::is_same_v<T, AdiabaticStep>) {
                        state = apply_adiabatic(state, model, step.parameter);
                        rec.kind = StepKind::Adiabatic;
                        rec.work = mean_energy(state) - u_before;
                    } else if constexpr (std::is_same_v<T, IsothermalStep>) {
                        if (!state.temperature)
                            throw ProtocolError("isothermal step needs a temperature-labelled state");
                        const Scalar bath = *state.temperature;
                        state = apply_isothermal(state, model, step.parameter, bath);
                        rec.kind = StepKind::Isothermal;
                        rec.heat = bath * (entropy(state) - s_before);
                        rec.work = mean_energy(state) - u_before - rec.heat;
                    } else if constexpr (std::is_same_v<T, ThermalizeStep>) {
                        state = apply_isothermal(state, state.spectrum, static_cast<Scalar>(step.temperature));
                        rec.kind = StepKind::Thermalize;
                        rec.heat = mean_energy(state) - u_before;
                    } else {
                        // Energy exchanged with the measuring apparatus is booked as work.
                        auto record = sample_measurement(state, step.seed);
                        state = std::get<ThermalState<Scalar>>(record.post);
                        rec.kind = StepKind::Measure;
                        rec.work = mean_energy(state) - u_before;
                    }
                },
                steps[i]);
            rec.parameter = state.spectrum.parameter;
            rec.temperature = state.temperature;
            rec.entropy = entropy(state);
            trace.records.push_back(rec);
        } catch (const Error& e) {
            throw ProtocolAborted<Scalar>("protocol step " + std::to_string(index) + " failed: " + e.what(),
                                          trace, index, std::current_exception());
        }
    }
    return run;
}

} // namespace nernst

#endif // NERNST_PROCESSES_HPP
