#ifndef NERNST_TOOLS_CONFIG_HPP
#define NERNST_TOOLS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nernst/processes.hpp"
#include "nernst/spectra.hpp"
#include "nernst/unattainability.hpp"

namespace nernst::cli {

/// A model evaluated at one parameter value.
struct SurfaceSpec {
    SpectrumModel model;
    double parameter;
};

struct Tolerances {
    /// Absolute tolerance of the entropy integral in thermo-table.
    double quadrature = kDefaultQuadTolerance;
    TruncationOptions truncation{};
    StaircaseOptions staircase{};
    B2Options b2{};
};

struct ThermoTableConfig {
    SurfaceSpec surface;
    std::vector<double> temperatures;
};

struct StaircaseConfig {
    SurfaceSpec a;
    SurfaceSpec b;
    double t0 = 1.0;
    double t_target = 0.0;
    std::size_t max_steps = 100;
    /// Run in long double instead of double.
    bool extended = false;
};

struct B2Config {
    SurfaceSpec alpha;
    SurfaceSpec beta;
    /// Truncation temperature for infinite spectra.
    double surface_t_max = 10.0;
};

struct MeasureConfig {
    SurfaceSpec surface;
    double temperature = 1.0;
    std::size_t trials = 1;
    /// Temperatures of the q0 table; empty selects the default grid.
    std::vector<double> q0_grid;
};

struct EquivalenceConfig {
    std::size_t models = 0;
    std::size_t max_steps = 10000;
};

struct ExperimentConfig {
    int schema = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output;
    unsigned workers = 0;
    Tolerances tolerances;
    std::optional<ThermoTableConfig> thermo_table;
    std::optional<StaircaseConfig> staircase;
    std::optional<B2Config> b2_solve;
    std::optional<MeasureConfig> measure_ensemble;
    std::optional<EquivalenceConfig> equivalence_suite;
};

/// Parses a schema-1 config; unknown keys and out-of-domain parameters throw ValidationError.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace nernst::cli

#endif // NERNST_TOOLS_CONFIG_HPP
