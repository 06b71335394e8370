#ifndef NERNST_SPECTRA_HPP
#define NERNST_SPECTRA_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nernst/error.hpp"

namespace nernst {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One energy level. Energies are dimensionless with k = hbar = 1.
struct Level {
    double energy = 0.0;
    int degeneracy = 1;

    friend bool operator==(const Level&, const Level&) = default;
};

/**
 * A truncated discrete spectrum: ascending level energies with the ground
 * pinned at 0, plus integer degeneracies.
 *
 * The energies are stored in the working scalar so that the same spectrum can
 * be evaluated in double or extended precision.
 */
template <typename Scalar = double>
struct Spectrum {
    Vector<Scalar> energies;
    Eigen::VectorXi degeneracies;
    /// External parameter the spectrum was generated at, if known.
    std::optional<double> parameter;

    Index size() const { return energies.size(); }
    int ground_degeneracy() const { return degeneracies(0); }
    Index microstates() const { return degeneracies.template cast<Index>().sum(); }
    Level level(Index i) const
    {
        return {static_cast<double>(energies(i)), degeneracies(i)};
    }

    /// Energy of the first excited level.
    Scalar first_gap() const { return size() > 1 ? energies(1) : Scalar(0); }

    /// Same degeneracies, every energy multiplied by `factor`.
    Spectrum scaled(Scalar factor) const
    {
        Spectrum out = *this;
        out.energies *= factor;
        out.parameter.reset();
        return out;
    }

    template <typename Other>
    Spectrum<Other> cast() const
    {
        return {energies.template cast<Other>(), degeneracies, parameter};
    }

    friend bool operator==(const Spectrum& a, const Spectrum& b)
    {
        return a.energies == b.energies && a.degeneracies == b.degeneracies;
    }
};

/// Checks the spectrum invariants and throws ValidationError on the first failure.
template <typename Scalar>
void validate(const Spectrum<Scalar>& s)
{
    if (s.size() == 0)
        throw ValidationError("spectrum has no levels");
    if (s.degeneracies.size() != s.size())
        throw ValidationError("spectrum energy/degeneracy length mismatch");
    if (s.energies(0) != Scalar(0))
        throw ValidationError("spectrum ground energy must be exactly 0");
    for (Index i = 0; i < s.size(); ++i) {
        using std::isfinite;
        if (!isfinite(s.energies(i)))
            throw ValidationError("spectrum energy is not finite");
        if (s.degeneracies(i) < 1)
            throw ValidationError("spectrum degeneracy must be >= 1");
        if (i > 0 && !(s.energies(i) > s.energies(i - 1)))
            throw ValidationError("spectrum energies must be strictly increasing");
    }
}

/// Builds a validated spectrum from a level list.
template <typename Scalar = double>
Spectrum<Scalar> make_spectrum(std::span<const Level> levels,
                               std::optional<double> parameter = std::nullopt)
{
    Spectrum<Scalar> s;
    s.energies.resize(static_cast<Index>(levels.size()));
    s.degeneracies.resize(static_cast<Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i) {
        s.energies(static_cast<Index>(i)) = static_cast<Scalar>(levels[i].energy);
        s.degeneracies(static_cast<Index>(i)) = levels[i].degeneracy;
    }
    s.parameter = parameter;
    validate(s);
    return s;
}

template <typename Scalar = double>
Spectrum<Scalar> make_spectrum(std::initializer_list<Level> levels)
{
    return make_spectrum<Scalar>(std::span<const Level>(levels.begin(), levels.size()));
}

enum class Family { TwoLevel, Harmonic, Box, DegenerateGround, Custom };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Closed interval of admissible external-parameter values.
struct ParameterDomain {
    double lo = 1e-6;
    double hi = 1e6;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// One row of a custom spectrum table.
struct CustomRow {
    double parameter = 0.0;
    std::vector<Level> levels;
};

/// Ground-degeneracy change for the degenerate_ground family: for x >= `at`
/// the ground is `degeneracy`-fold instead of the base value.
struct DegeneracySwitch {
    double at = 0.0;
    int degeneracy = 1;
};

inline constexpr Index kDefaultMaxLevels = 10000;

/**
 * A parameterized family of discrete spectra.
 *
 * Built-in families (ground shifted to 0 in all cases):
 *  - two_level:         {0, x}, nondegenerate
 *  - harmonic:          E_i = i x, nondegenerate, infinite
 *  - box:               E_n = (n^2 - 1) / x^2, n = 1, 2, ..., infinite
 *  - degenerate_ground: W-fold ground at 0, one level at x
 *  - custom:            tabulated levels, energies linear in x, degeneracies
 *                       piecewise constant (left-closed at each table row)
 */
class SpectrumModel {
public:
    static SpectrumModel two_level(ParameterDomain domain = {});
    static SpectrumModel harmonic(ParameterDomain domain = {});
    static SpectrumModel box(ParameterDomain domain = {});
    static SpectrumModel degenerate_ground(int ground_degeneracy, ParameterDomain domain = {},
                                           std::optional<DegeneracySwitch> change = std::nullopt);
    static SpectrumModel custom(std::vector<CustomRow> table);

    Family family() const { return family_; }
    const ParameterDomain& domain() const { return domain_; }
    std::string name() const { return to_string(family_); }

    /// Number of levels for finite families, nullopt for infinite ones.
    std::optional<Index> level_limit() const;

    /// Ground degeneracy at `x`; throws DomainError outside the domain.
    int ground_degeneracy(double x) const;

    void check_domain(double x) const;

    /// `count` levels at parameter `x`, energies computed in `Scalar`.
    template <typename Scalar = double>
    Spectrum<Scalar> levels(double x, Index count) const;

    const std::vector<CustomRow>& table() const { return table_; }

private:
    SpectrumModel(Family f, ParameterDomain d) : family_(f), domain_(d) {}

    std::vector<Level> custom_levels(double x) const;

    Family family_;
    ParameterDomain domain_;
    int ground_degeneracy_ = 1;
    std::optional<DegeneracySwitch> switch_;
    std::vector<CustomRow> table_;
};

template <typename Scalar>
Spectrum<Scalar> SpectrumModel::levels(double x, Index count) const
{
    check_domain(x);
    if (count < 2)
        throw ArgumentError("level count must be at least 2");
    if (auto limit = level_limit(); limit && count > *limit)
        throw ArgumentError(name() + " has only " + std::to_string(*limit) + " levels");

    Spectrum<Scalar> s;
    s.energies.resize(count);
    s.degeneracies.setOnes(count);
    s.parameter = x;
    const Scalar p = static_cast<Scalar>(x);
    switch (family_) {
    case Family::TwoLevel:
        s.energies << Scalar(0), p;
        break;
    case Family::Harmonic:
        for (Index i = 0; i < count; ++i)
            s.energies(i) = static_cast<Scalar>(i) * p;
        break;
    case Family::Box:
        for (Index i = 0; i < count; ++i) {
            const Scalar n = static_cast<Scalar>(i + 1);
            s.energies(i) = (n * n - Scalar(1)) / (p * p);
        }
        break;
    case Family::DegenerateGround:
        s.energies << Scalar(0), p;
        s.degeneracies(0) = ground_degeneracy(x);
        break;
    case Family::Custom: {
        const auto table_levels = custom_levels(x);
        for (Index i = 0; i < count; ++i) {
            s.energies(i) = static_cast<Scalar>(table_levels[static_cast<std::size_t>(i)].energy);
            s.degeneracies(i) = table_levels[static_cast<std::size_t>(i)].degeneracy;
        }
        break;
    }
    }
    return s;
}

/// Free-function form of SpectrumModel::levels.
template <typename Scalar = double>
Spectrum<Scalar> levels_at(const SpectrumModel& model, double x, Index count)
{
    return model.levels<Scalar>(x, count);
}

/// Truncation policy for infinite spectra.
struct TruncationOptions {
    double tail_tolerance = 1e-15;
    Index max_levels = kDefaultMaxLevels;
};

/**
 * Smallest N such that level N (0-based) carries a Boltzmann weight, relative
 * to the ground level, below the tail tolerance. Keeping levels 0..N-1 drops
 * only levels lighter than the tolerance. Finite families return their level
 * count. The result is never below 2.
 */
Index truncation_count(const SpectrumModel& model, double x, double temperature,
                       const TruncationOptions& options = {});

/// levels_at with the count chosen by truncation_count at `t_max`.
template <typename Scalar = double>
Spectrum<Scalar> truncated_levels(const SpectrumModel& model, double x, double t_max,
                                  const TruncationOptions& options = {})
{
    return model.levels<Scalar>(x, truncation_count(model, x, t_max, options));
}

} // namespace nernst

#endif // NERNST_SPECTRA_HPP
