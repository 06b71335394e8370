#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nernst/csv.hpp"
#include "nernst/measurement.hpp"
#include "nernst/thermo.hpp"

namespace nernst::cli {

namespace {

struct OutputError : Error {
    using Error::Error;
};

class OutputFile {
public:
    OutputFile(const RunContext& ctx, const std::string& name)
    {
        std::filesystem::create_directories(ctx.out_dir);
        path_ = ctx.out_dir / name;
        stream_.open(path_, std::ios::binary | std::ios::trunc);
        if (!stream_)
            throw OutputError("cannot open " + path_.string() + " for writing");
    }

    std::ostream& stream() { return stream_; }

    void close()
    {
        stream_.close();
        if (!stream_)
            throw OutputError("failed writing " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream stream_;
};

void write_text(const RunContext& ctx, const std::string& name, const std::string& text)
{
    OutputFile file(ctx, name);
    file.stream() << text;
    file.close();
    if (ctx.log)
        *ctx.log << text;
}

std::uint64_t require_seed(const ExperimentConfig& config, const char* command)
{
    if (!config.seed)
        throw ValidationError(std::string(command) + " is stochastic and needs a seed (config 'seed' or --seed)");
    return *config.seed;
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

template <typename Scalar>
int run_staircase(const ExperimentConfig& config, const StaircaseConfig& c, const RunContext& ctx)
{
    const auto& trunc = config.tolerances.truncation;
    const auto a = EntropySurface<Scalar>::from_model(c.a.model, c.a.parameter, c.t0, trunc);
    const auto b = EntropySurface<Scalar>::from_model(c.b.model, c.b.parameter, c.t0, trunc);
    const auto result = nernst::staircase(a, b, static_cast<Scalar>(c.t0), static_cast<Scalar>(c.t_target),
                                          c.max_steps, config.tolerances.staircase);

    OutputFile rounds(ctx, "staircase.csv");
    write_row(rounds.stream(), {"step", "t_start", "entropy_isothermal", "t_end"});
    for (const auto& r : result.rounds)
        write_row(rounds.stream(), {format_number(r.index), format_number(r.t_start),
                                    format_number(r.entropy_isothermal), format_number(r.t_end)});
    rounds.close();

    OutputFile trace(ctx, "staircase_trace.csv");
    write_trace_csv(trace.stream(), result.trace);
    trace.close();

    std::ostringstream summary;
    summary << "steps=" << result.steps << ",reached=" << yes_no(result.reached_target)
            << ",reached_zero=" << yes_no(result.reached_zero)
            << ",final_temperature=" << format_number(result.final_temperature) << '\n';
    write_text(ctx, "staircase_summary.txt", summary.str());
    return kSuccess;
}

} // namespace

int thermo_table(const ExperimentConfig& config, const RunContext& ctx)
{
    if (!config.thermo_table)
        throw ValidationError("config has no 'thermo_table' section");
    const auto& c = *config.thermo_table;

    double t_top = 0.0;
    for (double t : c.temperatures)
        t_top = std::max(t_top, t);
    if (!(t_top > 0.0))
        t_top = 1.0;
    const EntropySurface<double> surface(
        truncated_levels<double>(c.surface.model, c.surface.parameter, t_top, config.tolerances.truncation),
        t_top);
    const auto& spectrum = surface.spectrum();

    OutputFile file(ctx, "thermo_table.csv");
    std::vector<std::string> header{"T", "Z"};
    for (Index i = 0; i < spectrum.size(); ++i)
        header.push_back("p_" + std::to_string(i));
    for (const char* name : {"S_direct", "S_integral", "residual", "C"})
        header.emplace_back(name);
    write_row(file.stream(), header);

    double worst = 0.0;
    for (double t : c.temperatures) {
        const auto state = gibbs_populations(spectrum, t);
        const double direct = entropy(state);
        const double integral = entropy_via_integral(surface, t, config.tolerances.quadrature);
        const double residual = std::abs(integral - direct);
        worst = std::max(worst, residual);
        std::vector<std::string> row{format_number(t), t > 0.0 ? format_number(partition_function(spectrum, t)) : ""};
        for (Index i = 0; i < spectrum.size(); ++i)
            row.push_back(format_number(state.populations(i)));
        row.push_back(format_number(direct));
        row.push_back(format_number(integral));
        row.push_back(format_number(residual));
        row.push_back(t > 0.0 ? format_number(specific_heat(spectrum, t)) : "");
        write_row(file.stream(), row);
    }
    file.close();
    if (ctx.log)
        *ctx.log << "rows=" << c.temperatures.size() << ",levels=" << spectrum.size()
                 << ",max_residual=" << format_number(worst) << '\n';
    return kSuccess;
}

int staircase(const ExperimentConfig& config, const RunContext& ctx)
{
    if (!config.staircase)
        throw ValidationError("config has no 'staircase' section");
    const auto& c = *config.staircase;
    return c.extended ? run_staircase<long double>(config, c, ctx) : run_staircase<double>(config, c, ctx);
}

int b2_solve(const ExperimentConfig& config, const RunContext& ctx)
{
    if (!config.b2_solve)
        throw ValidationError("config has no 'b2_solve' section");
    const auto& c = *config.b2_solve;
    const auto& trunc = config.tolerances.truncation;
    const auto alpha = EntropySurface<double>::from_model(c.alpha.model, c.alpha.parameter, c.surface_t_max, trunc);
    const auto beta = EntropySurface<double>::from_model(c.beta.model, c.beta.parameter, c.surface_t_max, trunc);
    const auto sol = nernst::b2_solve(alpha, beta, config.tolerances.b2);

    std::ostringstream report;
    report << "delta_s0: " << format_number(sol.delta_s0) << '\n'
           << "t1: " << (sol.t1 ? format_number(*sol.t1) : "NONE") << '\n'
           << "residual: " << (sol.t1 ? format_number(sol.residual) : "") << '\n'
           << "bracket_exhausted: " << yes_no(sol.bracket_exhausted) << '\n'
           << "note: " << sol.note << '\n';
    write_text(ctx, "b2_solve.txt", report.str());
    return kSuccess;
}

int measure_ensemble(const ExperimentConfig& config, const RunContext& ctx)
{
    if (!config.measure_ensemble)
        throw ValidationError("config has no 'measure_ensemble' section");
    const auto& c = *config.measure_ensemble;
    const std::uint64_t seed = require_seed(config, "measure-ensemble");
    const auto r = ground_state_attainment(c.surface.model, c.surface.parameter, c.temperature, c.trials, seed,
                                           c.q0_grid, config.tolerances.truncation, config.workers);

    OutputFile trials(ctx, "measure_ensemble.csv");
    write_row(trials.stream(), {"trial", "outcome_level", "outcome_energy", "post_entropy"});
    for (const auto& o : r.outcomes)
        write_row(trials.stream(), {format_number(o.trial), format_number(o.outcome_level),
                                    format_number(o.outcome_energy), format_number(o.post_entropy)});
    trials.close();

    OutputFile table(ctx, "q0_table.csv");
    write_row(table.stream(), {"T", "q0"});
    for (const auto& [t, q0] : r.q0_table)
        write_row(table.stream(), {format_number(t), format_number(q0)});
    table.close();

    std::ostringstream summary;
    summary << "trials: " << r.trials << '\n'
            << "ground_hits: " << r.ground_hits << '\n'
            << "q0_exact: " << format_number(r.q0_exact) << '\n'
            << "q0_empirical: " << format_number(r.frequency) << '\n'
            << "sigma: " << format_number(r.sigma) << '\n'
            << "band_3sigma: " << format_number(r.band_low) << ',' << format_number(r.band_high) << '\n'
            << "within_band: " << yes_no(r.within_band) << '\n'
            << "wilson_3sigma: " << format_number(r.wilson_low) << ',' << format_number(r.wilson_high) << '\n'
            << "q0_strictly_decreasing: " << yes_no(r.q0_strictly_decreasing) << '\n';
    write_text(ctx, "measure_summary.txt", summary.str());
    return kSuccess;
}

int equivalence_suite(const ExperimentConfig& config, const RunContext& ctx)
{
    if (!config.equivalence_suite)
        throw ValidationError("config has no 'equivalence_suite' section");
    const auto& c = *config.equivalence_suite;
    const std::uint64_t seed = require_seed(config, "equivalence-suite");
    HarnessOptions options;
    options.max_steps = c.max_steps;
    options.b2 = config.tolerances.b2;
    options.workers = config.workers;
    const auto report = equivalence_harness(c.models, seed, options);

    OutputFile csv(ctx, "equivalence.csv");
    report.write_csv(csv.stream());
    csv.close();
    std::ostringstream summary;
    report.write_summary(summary);
    write_text(ctx, "equivalence_summary.txt", summary.str());
    return report.counterexamples == 0 ? kSuccess : kCounterexample;
}

int exit_code_for(const std::exception_ptr& error)
{
    try {
        std::rethrow_exception(error);
    } catch (const NumericalError&) {
        return kNumericalFailure;
    } catch (const TruncationError&) {
        return kNumericalFailure;
    } catch (const Error&) {
        return kValidationFailure;
    } catch (const nlohmann::json::exception&) {
        return kValidationFailure;
    } catch (const std::filesystem::filesystem_error&) {
        return kValidationFailure;
    } catch (...) {
        return kNumericalFailure;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Third-law thermodynamics toolkit: tables, staircases, b2 solutions, measurement ensembles"};
    app.name("nernst");
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "Experiment config (JSON, schema 1)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--seed", seed, "Random seed (overrides the config)");
    app.add_flag("--quiet", quiet, "Do not print summaries");

    using Command = int (*)(const ExperimentConfig&, const RunContext&);
    const std::vector<std::pair<std::string, Command>> commands{
        {"thermo-table", &thermo_table},
        {"staircase", &staircase},
        {"b2-solve", &b2_solve},
        {"measure-ensemble", &measure_ensemble},
        {"equivalence-suite", &equivalence_suite},
    };
    const std::vector<std::string> descriptions{
        "Tabulate Z, populations, entropy (direct and integral) and heat capacity over a T grid",
        "Run the isothermal/adiabatic staircase between two entropy curves",
        "Solve for the start temperature of an adiabat ending at T = 0",
        "Sample energy measurements on a Gibbs state",
        "Randomized check that the heat theorem and adiabatic unattainability agree",
    };
    for (std::size_t i = 0; i < commands.size(); ++i)
        app.add_subcommand(commands[i].first, descriptions[i]);

    std::vector<std::string> argv_storage{"nernst"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage)
        argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidationFailure;
    }

    try {
        ExperimentConfig config = load_config(config_path);
        if (seed)
            config.seed = seed;
        RunContext ctx;
        if (!out_dir.empty())
            ctx.out_dir = out_dir;
        else if (config.output)
            ctx.out_dir = *config.output;
        ctx.log = quiet ? nullptr : &out;
        for (const auto& [name, command] : commands) {
            if (app.got_subcommand(name))
                return command(config, ctx);
        }
        return kValidationFailure;
    } catch (...) {
        const auto error = std::current_exception();
        try {
            throw;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
        } catch (...) {
            err << "error: unknown failure\n";
        }
        return exit_code_for(error);
    }
}

} // namespace nernst::cli
