#include "nernst/unattainability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nernst/parallel.hpp"
#include "nernst/rng.hpp"

namespace nernst {

AttainabilityOracle b2_oracle(const SpectrumModel& model, const DeduceOptions& options)
{
    return [model, options](double alpha, double beta) {
        const auto a = EntropySurface<double>::from_model(model, alpha, options.surface_t_max, options.truncation);
        const auto b = EntropySurface<double>::from_model(model, beta, options.surface_t_max, options.truncation);
        return b2_solve(a, b, options.b2);
    };
}

NernstDeduction deduce_nernst(const SpectrumModel& model, std::span<const double> grid,
                              const AttainabilityOracle& oracle)
{
    if (grid.size() < 2)
        throw ArgumentError("deduce_nernst needs at least two grid points");
    NernstDeduction out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (i == j)
                continue;
            PairFinding f{grid[i], grid[j], oracle(grid[i], grid[j])};
            if (f.solution.t1)
                out.attainable.push_back(std::move(f));
            else if (f.solution.bracket_exhausted)
                out.undetermined.push_back(std::move(f));
            else if (j > i) {
                // Unattainable alpha -> beta; the reverse direction is checked when i, j swap.
                const auto reverse = oracle(grid[j], grid[i]);
                if (!reverse.t1 && !reverse.bracket_exhausted && !nernst_check(model, grid[i], grid[j]).holds)
                    out.inconsistent.push_back(std::move(f));
            }
        }
    }
    out.holds = out.attainable.empty() && out.undetermined.empty() && out.inconsistent.empty();
    return out;
}

NernstDeduction deduce_nernst(const SpectrumModel& model, std::span<const double> grid,
                              const DeduceOptions& options)
{
    return deduce_nernst(model, grid, b2_oracle(model, options));
}

Spectrum<double> random_spectrum(Rng& rng, std::optional<int> ground_degeneracy)
{
    static constexpr int kGround[] = {1, 2, 4};
    const auto n = static_cast<Index>(rng.uniform_int(2, 20));
    Spectrum<double> s;
    s.energies.resize(n);
    s.degeneracies.setOnes(n);
    s.energies(0) = 0.0;
    for (Index i = 1; i < n; ++i)
        s.energies(i) = s.energies(i - 1) + rng.uniform(0.1, 10.0);
    s.degeneracies(0) = ground_degeneracy ? *ground_degeneracy : kGround[rng.uniform_int(0, 2)];
    return s;
}

RandomPair random_pair(std::uint64_t seed, std::size_t id)
{
    Rng rng = Rng(seed).split(id);
    RandomPair p;
    p.id = id;
    p.first = random_spectrum(rng);
    p.second = random_spectrum(rng);
    p.compression = rng.uniform(1.1, 2.5);
    return p;
}

RandomPair random_nernst_pair(std::uint64_t seed, std::size_t id)
{
    Rng rng = Rng(seed).split(id);
    RandomPair p;
    p.id = id;
    p.first = random_spectrum(rng);
    p.second = random_spectrum(rng, p.first.ground_degeneracy());
    p.compression = rng.uniform(1.1, 2.5);
    return p;
}

StaircaseResult<long double> nernst_staircase(const Spectrum<double>& a, double compression,
                                              std::size_t max_steps)
{
    const auto wide = a.cast<long double>();
    const EntropySurface<long double> curve_a(wide);
    const EntropySurface<long double> curve_b(wide.scaled(static_cast<long double>(compression)));
    StaircaseOptions options;
    options.record_trace = false;
    return staircase(curve_a, curve_b, 1.0L, 0.0L, max_steps, options);
}

StaircaseResult<long double> violating_staircase(const Spectrum<double>& high, const Spectrum<double>& low,
                                                 std::size_t max_steps)
{
    const EntropySurface<long double> curve_a(high.cast<long double>());
    const EntropySurface<long double> curve_b(low.cast<long double>());
    StaircaseOptions options;
    options.record_trace = false;
    // Curves may cross more than once, so each candidate T0 is screened on a
    // dense grid before the staircase applies its own check.
    constexpr int kDensePoints = 2048;
    long double t0 = 8.0L;
    for (int i = 0;; ++i, t0 /= 2) {
        try {
            check_curve_ordering(curve_a, curve_b, static_cast<long double>(options.ordering_floor), t0,
                                 kDensePoints);
            return staircase(curve_a, curve_b, t0, 0.0L, max_steps, options);
        } catch (const ProtocolError&) {
            if (i > 200)
                throw;
        }
    }
}

namespace {

std::string describe(const Spectrum<double>& s)
{
    std::ostringstream os;
    os << '[';
    for (Index i = 0; i < s.size(); ++i) {
        if (i)
            os << ' ';
        os << format_number(s.energies(i)) << '/' << s.degeneracies(i);
    }
    os << ']';
    return os.str();
}

void flag(HarnessRow& row, const std::string& why)
{
    row.counterexample = true;
    if (!row.detail.empty())
        row.detail += "; ";
    row.detail += why;
}

} // namespace

HarnessRow classify_pair(const RandomPair& pair, const HarnessOptions& options)
{
    HarnessRow row;
    row.model_id = pair.id;
    row.description = "first=" + describe(pair.first) + " second=" + describe(pair.second) +
                      " compression=" + format_number(pair.compression);

    const EntropySurface<double> first(pair.first);
    const EntropySurface<double> second(pair.second);
    row.nernst_holds = first.zero_entropy() == second.zero_entropy();
    row.b2_forward = b2_solve(first, second, options.b2);
    row.b2_reverse = b2_solve(second, first, options.b2);

    if (row.nernst_holds) {
        if (row.b2_forward.t1 || row.b2_forward.bracket_exhausted)
            flag(row, "b2 forward has a solution although S(0) agrees");
        if (row.b2_reverse.t1 || row.b2_reverse.bracket_exhausted)
            flag(row, "b2 reverse has a solution although S(0) agrees");
        const auto run = nernst_staircase(pair.first, pair.compression, options.max_steps);
        row.staircase_reached_zero = run.reached_zero;
        row.steps = run.steps;
        row.log10_final_temperature = static_cast<double>(std::log10(run.final_temperature));
        if (run.reached_zero || !(run.final_temperature > 0.0L) || run.steps != options.max_steps)
            flag(row, "staircase reached T = 0 with equal S(0)");
    } else {
        const bool first_lower = first.zero_entropy() < second.zero_entropy();
        const auto& up = first_lower ? row.b2_forward : row.b2_reverse;
        const auto& down = first_lower ? row.b2_reverse : row.b2_forward;
        if (!up.t1 && !up.bracket_exhausted)
            flag(row, "no b2 solution in the direction of increasing S(0)");
        if (up.t1 && !(up.residual <= 1e-8))
            flag(row, "b2 residual above 1e-8");
        if (down.t1 || down.bracket_exhausted)
            flag(row, "b2 solution in the direction of decreasing S(0)");
        const auto& high = first_lower ? pair.second : pair.first;
        const auto& low = first_lower ? pair.first : pair.second;
        const auto run = violating_staircase(high, low, options.max_steps);
        row.staircase_reached_zero = run.reached_zero;
        row.steps = run.steps;
        row.log10_final_temperature = static_cast<double>(std::log10(run.final_temperature));
        if (!run.reached_zero)
            flag(row, "staircase did not reach T = 0 with different S(0)");
    }
    return row;
}

HarnessReport summarize(std::vector<HarnessRow> rows)
{
    HarnessReport r;
    r.rows = std::move(rows);
    std::sort(r.rows.begin(), r.rows.end(),
              [](const HarnessRow& a, const HarnessRow& b) { return a.model_id < b.model_id; });
    for (const auto& row : r.rows) {
        r.counterexamples += row.counterexample;
        if (row.nernst_holds) {
            ++r.nernst_pairs;
        } else {
            ++r.violating_pairs;
            if (row.staircase_reached_zero)
                r.max_steps_to_zero = std::max(r.max_steps_to_zero, row.steps);
        }
        r.b2_solutions += row.b2_forward.t1.has_value() + row.b2_reverse.t1.has_value();
        r.bracket_notes += row.b2_forward.bracket_exhausted + row.b2_reverse.bracket_exhausted;
        r.reached_zero += row.staircase_reached_zero;
    }
    return r;
}

HarnessReport equivalence_harness(std::size_t n_models, std::uint64_t seed, const HarnessOptions& options)
{
    std::vector<HarnessRow> rows(n_models);
    parallel_for(n_models, options.workers,
                 [&](std::size_t i) { rows[i] = classify_pair(random_pair(seed, i), options); });
    return summarize(std::move(rows));
}

namespace {

std::string b2_cell(const B2Solution<double>& s)
{
    if (s.t1)
        return format_number(*s.t1);
    return s.bracket_exhausted ? "bracket" : "none";
}

} // namespace

void HarnessReport::write_csv(std::ostream& os) const
{
    write_row(os, {"model_id", "nernst_holds", "b2_forward", "b2_reverse", "staircase_reached_zero", "steps"});
    for (const auto& row : rows)
        write_row(os, {format_number(row.model_id), row.nernst_holds ? "true" : "false", b2_cell(row.b2_forward),
                       b2_cell(row.b2_reverse), row.staircase_reached_zero ? "true" : "false",
                       format_number(row.steps)});
}

void HarnessReport::write_summary(std::ostream& os) const
{
    os << "models: " << rows.size() << '\n'
       << "nernst_pairs: " << nernst_pairs << '\n'
       << "violating_pairs: " << violating_pairs << '\n'
       << "b2_solutions: " << b2_solutions << '\n'
       << "bracket_notes: " << bracket_notes << '\n'
       << "staircases_reaching_zero: " << reached_zero << '\n'
       << "max_steps_to_zero: " << max_steps_to_zero << '\n'
       << "counterexamples: " << counterexamples << '\n';
    for (const auto& row : rows) {
        if (row.counterexample)
            os << "counterexample model_id=" << row.model_id << ": " << row.detail << " :: " << row.description
               << '\n';
    }
}

} // namespace nernst
