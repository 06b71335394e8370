#include "nernst/measurement.hpp"

#include <algorithm>

namespace nernst {

namespace {

std::vector<double> default_grid(double t)
{
    constexpr int kPoints = 13;
    std::vector<double> grid(kPoints);
    for (int i = 0; i < kPoints; ++i)
        grid[i] = t * std::pow(10.0, -1.0 + 2.0 * i / (kPoints - 1));
    return grid;
}

} // namespace

GroundAttainmentReport ground_state_attainment(const SpectrumModel& model, double x, double t,
                                               std::size_t n_trials, std::uint64_t seed,
                                               std::vector<double> t_grid,
                                               const TruncationOptions& truncation,
                                               unsigned workers)
{
    if (!(t > 0.0))
        throw ArgumentError("ground_state_attainment needs T > 0");
    if (n_trials < 1)
        throw ArgumentError("ground_state_attainment needs at least one trial");
    if (t_grid.empty())
        t_grid = default_grid(t);
    std::sort(t_grid.begin(), t_grid.end());
    if (!(t_grid.front() > 0.0))
        throw ArgumentError("temperature grid must be positive");

    const double t_top = std::max(t, t_grid.back());
    const auto spectrum = truncated_levels<double>(model, x, t_top, truncation);
    const auto state = gibbs_populations(spectrum, t);

    GroundAttainmentReport r;
    r.trials = n_trials;
    r.outcomes.resize(n_trials);
    const Rng master(seed);
    parallel_for(n_trials, workers, [&](std::size_t i) {
        Rng stream = master.split(i);
        const auto rec = sample_measurement(state, stream);
        r.outcomes[i] = {i, rec.outcome, rec.energy, rec.entropy_after};
    });
    r.ground_hits = static_cast<std::size_t>(std::count_if(
        r.outcomes.begin(), r.outcomes.end(), [](const TrialOutcome& o) { return o.outcome_level == 0; }));

    const double n = static_cast<double>(n_trials);
    r.frequency = static_cast<double>(r.ground_hits) / n;
    r.q0_exact = state.populations(0);
    r.sigma = std::sqrt(r.q0_exact * (1.0 - r.q0_exact) / n);
    r.band_low = r.q0_exact - 3.0 * r.sigma;
    r.band_high = r.q0_exact + 3.0 * r.sigma;
    r.within_band = std::abs(r.frequency - r.q0_exact) <= 3.0 * r.sigma;

    constexpr double z = 3.0;
    const double denom = 1.0 + z * z / n;
    const double centre = (r.frequency + z * z / (2.0 * n)) / denom;
    const double half =
        z / denom * std::sqrt(r.frequency * (1.0 - r.frequency) / n + z * z / (4.0 * n * n));
    r.wilson_low = std::max(0.0, centre - half);
    r.wilson_high = std::min(1.0, centre + half);

    for (double tg : t_grid) {
        const double q0 = gibbs_populations(spectrum, tg).populations(0);
        if (!r.q0_table.empty() && !(q0 < r.q0_table.back().second))
            r.q0_strictly_decreasing = false;
        r.q0_table.emplace_back(tg, q0);
    }
    return r;
}

} // namespace nernst
