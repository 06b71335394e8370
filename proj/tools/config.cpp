#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nernst::cli {

namespace {

using nlohmann::json;

// Object view that remembers which keys were read, so leftovers can be
// rejected once a section is fully parsed.
class Section {
public:
    Section(const json& value, std::string path) : value_(value), path_(std::move(path))
    {
        if (!value_.is_object())
            fail("must be an object");
    }

    ~Section() = default;
    Section(const Section&) = delete;
    Section& operator=(const Section&) = delete;

    bool has(const std::string& key) const { return value_.contains(key); }

    const json& get(const std::string& key)
    {
        if (!value_.contains(key))
            throw ValidationError(path_ + ": missing required field '" + key + "'");
        seen_.insert(key);
        return value_.at(key);
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    double number(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number())
            throw ValidationError(path(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ValidationError(path(key) + ": expected a finite number");
        return x;
    }

    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    double positive(const std::string& key, double fallback)
    {
        const double x = number(key, fallback);
        if (!(x > 0.0))
            throw ValidationError(path(key) + ": must be positive");
        return x;
    }

    std::uint64_t unsigned_int(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw ValidationError(path(key) + ": expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback)
    {
        return has(key) ? unsigned_int(key) : fallback;
    }

    int positive_int(const std::string& key)
    {
        const std::uint64_t v = unsigned_int(key);
        if (v < 1 || v > static_cast<std::uint64_t>(std::numeric_limits<int>::max()))
            throw ValidationError(path(key) + ": expected a positive integer");
        return static_cast<int>(v);
    }

    std::string string(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_string())
            throw ValidationError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = get(key);
        if (!v.is_boolean())
            throw ValidationError(path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key)
    {
        const json& v = get(key);
        if (!v.is_array())
            throw ValidationError(path(key) + ": expected an array of numbers");
        std::vector<double> out;
        for (const auto& item : v) {
            if (!item.is_number() || !std::isfinite(item.get<double>()))
                throw ValidationError(path(key) + ": expected an array of finite numbers");
            out.push_back(item.get<double>());
        }
        return out;
    }

    void finish() const
    {
        for (const auto& [key, unused] : value_.items()) {
            if (!seen_.count(key))
                throw ValidationError(path_ + ": unknown field '" + key + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const { throw ValidationError(path_ + ": " + what); }

private:
    const json& value_;
    std::string path_;
    std::set<std::string> seen_;
};

ParameterDomain parse_domain(Section& s)
{
    ParameterDomain d;
    if (!s.has("domain"))
        return d;
    const json& v = s.get("domain");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ValidationError(s.path("domain") + ": expected [lo, hi]");
    d.lo = v[0].get<double>();
    d.hi = v[1].get<double>();
    return d;
}

std::vector<Level> parse_levels(const json& v, const std::string& path)
{
    if (!v.is_array())
        throw ValidationError(path + ": expected an array of [energy, degeneracy] pairs");
    std::vector<Level> out;
    for (const auto& pair : v) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number_integer())
            throw ValidationError(path + ": expected [energy, degeneracy] pairs");
        out.push_back({pair[0].get<double>(), pair[1].get<int>()});
    }
    return out;
}

SpectrumModel parse_model(const json& value, const std::string& path)
{
    Section s(value, path);
    const std::string name = s.string("family");
    Family family;
    try {
        family = family_from_string(name);
    } catch (const Error& e) {
        throw ValidationError(s.path("family") + ": " + e.what());
    }

    std::optional<SpectrumModel> model;
    switch (family) {
    case Family::TwoLevel:
        model = SpectrumModel::two_level(parse_domain(s));
        break;
    case Family::Harmonic:
        model = SpectrumModel::harmonic(parse_domain(s));
        break;
    case Family::Box:
        model = SpectrumModel::box(parse_domain(s));
        break;
    case Family::DegenerateGround: {
        const int w = s.positive_int("ground_degeneracy");
        const ParameterDomain domain = parse_domain(s);
        std::optional<DegeneracySwitch> change;
        if (s.has("switch")) {
            Section sw(s.get("switch"), s.path("switch"));
            change = DegeneracySwitch{sw.number("at"), sw.positive_int("degeneracy")};
            sw.finish();
        }
        model = SpectrumModel::degenerate_ground(w, domain, change);
        break;
    }
    case Family::Custom: {
        const json& rows = s.get("table");
        if (!rows.is_array())
            throw ValidationError(s.path("table") + ": expected an array of rows");
        std::vector<CustomRow> table;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Section row(rows[i], s.path("table") + "[" + std::to_string(i) + "]");
            table.push_back({row.number("parameter"), parse_levels(row.get("levels"), row.path("levels"))});
            row.finish();
        }
        model = SpectrumModel::custom(std::move(table));
        break;
    }
    }
    s.finish();
    return *model;
}

SurfaceSpec parse_surface(Section& s)
{
    SurfaceSpec spec{parse_model(s.get("model"), s.path("model")), s.number("parameter")};
    try {
        spec.model.check_domain(spec.parameter);
    } catch (const DomainError& e) {
        throw ValidationError(s.path("parameter") + ": " + e.what());
    }
    return spec;
}

SurfaceSpec parse_surface(const json& value, const std::string& path)
{
    Section s(value, path);
    auto spec = parse_surface(s);
    s.finish();
    return spec;
}

std::vector<double> parse_temperatures(Section& s, const std::string& key)
{
    auto ts = s.numbers(key);
    for (double t : ts) {
        if (t < 0.0)
            throw ValidationError(s.path(key) + ": temperatures must be nonnegative");
    }
    return ts;
}

Tolerances parse_tolerances(const json& value)
{
    Section s(value, "tolerances");
    Tolerances t;
    t.quadrature = s.positive("quadrature", t.quadrature);
    t.truncation.tail_tolerance = s.positive("tail", t.truncation.tail_tolerance);
    t.truncation.max_levels =
        static_cast<Index>(s.unsigned_int("max_levels", static_cast<std::uint64_t>(t.truncation.max_levels)));
    t.staircase.root_rel_tol = s.positive("root_rel", t.staircase.root_rel_tol);
    t.staircase.ordering_floor = s.positive("ordering_floor", t.staircase.ordering_floor);
    if (s.has("ordering_points"))
        t.staircase.ordering_points = s.positive_int("ordering_points");
    t.b2.bracket_max = s.positive("bracket_max", t.b2.bracket_max);
    t.b2.quad_tol = s.positive("b2_quadrature", t.b2.quad_tol);
    t.b2.rel_tol = s.positive("b2_rel", t.b2.rel_tol);
    s.finish();
    if (t.truncation.tail_tolerance >= 1.0)
        throw ValidationError("tolerances.tail: must be below 1");
    if (t.truncation.max_levels < 2)
        throw ValidationError("tolerances.max_levels: must be at least 2");
    return t;
}

ThermoTableConfig parse_thermo_table(const json& value)
{
    Section s(value, "thermo_table");
    ThermoTableConfig c{parse_surface(s), parse_temperatures(s, "temperatures")};
    s.finish();
    return c;
}

StaircaseConfig parse_staircase(const json& value)
{
    Section s(value, "staircase");
    StaircaseConfig c{parse_surface(s.get("a"), s.path("a")), parse_surface(s.get("b"), s.path("b"))};
    c.t0 = s.positive("t0", c.t0);
    c.t_target = s.number("t_target", c.t_target);
    c.max_steps = s.unsigned_int("max_steps", c.max_steps);
    c.extended = s.boolean("extended_precision", c.extended);
    s.finish();
    if (!(c.t_target >= 0.0) || !(c.t_target < c.t0))
        throw ValidationError("staircase: need 0 <= t_target < t0");
    if (c.max_steps < 1)
        throw ValidationError("staircase.max_steps: must be at least 1");
    return c;
}

B2Config parse_b2(const json& value)
{
    Section s(value, "b2_solve");
    B2Config c{parse_surface(s.get("alpha"), s.path("alpha")), parse_surface(s.get("beta"), s.path("beta"))};
    c.surface_t_max = s.positive("surface_t_max", c.surface_t_max);
    s.finish();
    return c;
}

MeasureConfig parse_measure(const json& value)
{
    Section s(value, "measure_ensemble");
    MeasureConfig c{parse_surface(s), 1.0, 1, {}};
    c.temperature = s.positive("temperature", c.temperature);
    c.trials = s.unsigned_int("trials");
    if (s.has("q0_grid"))
        c.q0_grid = parse_temperatures(s, "q0_grid");
    s.finish();
    if (c.trials < 1)
        throw ValidationError("measure_ensemble.trials: must be at least 1");
    for (double t : c.q0_grid) {
        if (!(t > 0.0))
            throw ValidationError("measure_ensemble.q0_grid: temperatures must be positive");
    }
    return c;
}

EquivalenceConfig parse_equivalence(const json& value)
{
    Section s(value, "equivalence_suite");
    EquivalenceConfig c;
    c.models = s.unsigned_int("models");
    c.max_steps = s.unsigned_int("max_steps", c.max_steps);
    s.finish();
    if (c.max_steps < 1)
        throw ValidationError("equivalence_suite.max_steps: must be at least 1");
    return c;
}

} // namespace

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    Section s(root, "config");
    ExperimentConfig c;
    const json& schema = s.get("schema");
    if (!schema.is_number_integer() || schema.get<int>() != 1)
        throw ValidationError("config.schema: only schema 1 is supported");
    if (s.has("seed"))
        c.seed = s.unsigned_int("seed");
    if (s.has("output"))
        c.output = s.string("output");
    c.workers = static_cast<unsigned>(s.unsigned_int("workers", 0));
    if (s.has("tolerances"))
        c.tolerances = parse_tolerances(s.get("tolerances"));
    if (s.has("thermo_table"))
        c.thermo_table = parse_thermo_table(s.get("thermo_table"));
    if (s.has("staircase"))
        c.staircase = parse_staircase(s.get("staircase"));
    if (s.has("b2_solve"))
        c.b2_solve = parse_b2(s.get("b2_solve"));
    if (s.has("measure_ensemble"))
        c.measure_ensemble = parse_measure(s.get("measure_ensemble"));
    if (s.has("equivalence_suite"))
        c.equivalence_suite = parse_equivalence(s.get("equivalence_suite"));
    s.finish();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace nernst::cli
