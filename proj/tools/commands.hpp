#ifndef NERNST_TOOLS_COMMANDS_HPP
#define NERNST_TOOLS_COMMANDS_HPP

#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace nernst::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kNumericalFailure = 2,
    kCounterexample = 3,
};

/// Where a subcommand writes its files and its human-readable summary.
struct RunContext {
    std::filesystem::path out_dir = ".";
    std::ostream* log = nullptr;
};

int thermo_table(const ExperimentConfig& config, const RunContext& ctx);
int staircase(const ExperimentConfig& config, const RunContext& ctx);
int b2_solve(const ExperimentConfig& config, const RunContext& ctx);
int measure_ensemble(const ExperimentConfig& config, const RunContext& ctx);
int equivalence_suite(const ExperimentConfig& config, const RunContext& ctx);

/// Exit code for an exception escaping a subcommand.
int exit_code_for(const std::exception_ptr& error);

/// Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nernst::cli

#endif // NERNST_TOOLS_COMMANDS_HPP
