#include "nernst/spectra.hpp"

#include <algorithm>
#include <limits>

namespace nernst {

std::string to_string(Family f)
{
    switch (f) {
    case Family::TwoLevel: return "two_level";
    case Family::Harmonic: return "harmonic";
    case Family::Box: return "box";
    case Family::DegenerateGround: return "degenerate_ground";
    case Family::Custom: return "custom";
    }
    return "unknown";
}

Family family_from_string(const std::string& name)
{
    for (Family f : {Family::TwoLevel, Family::Harmonic, Family::Box, Family::DegenerateGround,
                     Family::Custom}) {
        if (to_string(f) == name)
            return f;
    }
    throw ValidationError("unknown spectrum family '" + name + "'");
}

namespace {

void check_domain_shape(const ParameterDomain& d)
{
    if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || d.lo > d.hi)
        throw ValidationError("parameter domain must be a finite interval with lo <= hi");
}

// Gap-type families need strictly positive parameters.
void check_positive_domain(const ParameterDomain& d)
{
    check_domain_shape(d);
    if (!(d.lo > 0.0))
        throw ValidationError("parameter domain must lie in x > 0");
}

} // namespace

SpectrumModel SpectrumModel::two_level(ParameterDomain domain)
{
    check_positive_domain(domain);
    return {Family::TwoLevel, domain};
}

SpectrumModel SpectrumModel::harmonic(ParameterDomain domain)
{
    check_positive_domain(domain);
    return {Family::Harmonic, domain};
}

SpectrumModel SpectrumModel::box(ParameterDomain domain)
{
    check_positive_domain(domain);
    return {Family::Box, domain};
}

SpectrumModel SpectrumModel::degenerate_ground(int ground_degeneracy, ParameterDomain domain,
                                               std::optional<DegeneracySwitch> change)
{
    check_positive_domain(domain);
    if (ground_degeneracy < 1)
        throw ValidationError("ground degeneracy must be >= 1");
    if (change && change->degeneracy < 1)
        throw ValidationError("switched ground degeneracy must be >= 1");
    SpectrumModel m{Family::DegenerateGround, domain};
    m.ground_degeneracy_ = ground_degeneracy;
    m.switch_ = change;
    return m;
}

SpectrumModel SpectrumModel::custom(std::vector<CustomRow> table)
{
    if (table.empty())
        throw ValidationError("custom spectrum table is empty");
    std::sort(table.begin(), table.end(),
              [](const CustomRow& a, const CustomRow& b) { return a.parameter < b.parameter; });
    const std::size_t n = table.front().levels.size();
    if (n < 2)
        throw ValidationError("custom spectrum rows need at least 2 levels");
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& row = table[r];
        if (!std::isfinite(row.parameter))
            throw ValidationError("custom table parameter is not finite");
        if (r > 0 && !(row.parameter > table[r - 1].parameter))
            throw ValidationError("custom table parameters must be distinct");
        if (row.levels.size() != n)
            throw ValidationError("custom table rows must all have the same level count");
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(row.levels[i].energy))
                throw ValidationError("custom table energy is not finite");
            if (row.levels[i].degeneracy < 1)
                throw ValidationError("custom table degeneracy must be >= 1");
            if (i > 0 && !(row.levels[i].energy > row.levels[i - 1].energy))
                throw ValidationError("custom table energies must be strictly increasing per row");
        }
    }
    SpectrumModel m{Family::Custom, {table.front().parameter, table.back().parameter}};
    m.table_ = std::move(table);
    return m;
}

std::optional<Index> SpectrumModel::level_limit() const
{
    switch (family_) {
    case Family::TwoLevel:
    case Family::DegenerateGround:
        return 2;
    case Family::Custom:
        return static_cast<Index>(table_.front().levels.size());
    case Family::Harmonic:
    case Family::Box:
        return std::nullopt;
    }
    return std::nullopt;
}

void SpectrumModel::check_domain(double x) const
{
    if (!domain_.contains(x))
        throw DomainError(name() + ": parameter " + std::to_string(x) + " outside [" +
                          std::to_string(domain_.lo) + ", " + std::to_string(domain_.hi) + "]");
}

int SpectrumModel::ground_degeneracy(double x) const
{
    check_domain(x);
    switch (family_) {
    case Family::DegenerateGround:
        return (switch_ && x >= switch_->at) ? switch_->degeneracy : ground_degeneracy_;
    case Family::Custom:
        return custom_levels(x).front().degeneracy;
    default:
        return 1;
    }
}

std::vector<Level> SpectrumModel::custom_levels(double x) const
{
    // Row holding the degeneracies: the last table parameter <= x.
    std::size_t k = 0;
    while (k + 1 < table_.size() && table_[k + 1].parameter <= x)
        ++k;
    std::vector<Level> out = table_[k].levels;
    if (k + 1 < table_.size() && x > table_[k].parameter) {
        const auto& a = table_[k];
        const auto& b = table_[k + 1];
        const double w = (x - a.parameter) / (b.parameter - a.parameter);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i].energy = (1.0 - w) * a.levels[i].energy + w * b.levels[i].energy;
    }
    const double ground = out.front().energy;
    for (auto& l : out)
        l.energy -= ground;
    out.front().energy = 0.0;
    return out;
}

namespace {

// Weight of level n relative to the ground, for the infinite families.
double relative_weight(Family f, double x, Index n, double temperature)
{
    double e = 0.0;
    if (f == Family::Harmonic) {
        e = static_cast<double>(n) * x;
    } else {
        const double m = static_cast<double>(n + 1);
        e = (m * m - 1.0) / (x * x);
    }
    return std::exp(-e / temperature);
}

} // namespace

Index truncation_count(const SpectrumModel& model, double x, double temperature,
                       const TruncationOptions& options)
{
    model.check_domain(x);
    if (!(temperature > 0.0))
        throw ArgumentError("truncation_count needs a positive temperature");
    if (!(options.tail_tolerance > 0.0 && options.tail_tolerance < 1.0))
        throw ArgumentError("tail tolerance must lie in (0, 1)");
    if (options.max_levels < 2)
        throw ArgumentError("truncation cap must be at least 2 levels");
    if (auto limit = model.level_limit())
        return *limit;

    for (Index n = 1; n <= options.max_levels; ++n) {
        if (relative_weight(model.family(), x, n, temperature) < options.tail_tolerance)
            return std::max<Index>(n, 2);
    }
    const double tail = relative_weight(model.family(), x, options.max_levels, temperature);
    throw TruncationError(model.name() + ": truncation cap of " +
                              std::to_string(options.max_levels) + " levels exceeded",
                          tail);
}

} // namespace nernst
