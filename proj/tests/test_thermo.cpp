#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nernst/thermo.hpp"
#include "oracles.hpp"

using namespace nernst;

namespace {

const double kE = std::exp(-1.0);

Spectrum<double> two_level(double gap) { return levels_at(SpectrumModel::two_level(), gap, 2); }

std::vector<EntropySurface<double>> builtin_surfaces(double t_max)
{
    const auto custom = SpectrumModel::custom({{1.0, {{0.0, 1}, {0.4, 2}, {1.5, 1}, {3.0, 3}}},
                                               {2.0, {{0.0, 1}, {0.8, 2}, {2.0, 1}, {5.0, 3}}}});
    return {EntropySurface<double>::from_model(SpectrumModel::two_level(), 1.0, t_max),
            EntropySurface<double>::from_model(SpectrumModel::harmonic(), 1.0, t_max),
            EntropySurface<double>::from_model(SpectrumModel::box(), 1.0, t_max),
            EntropySurface<double>::from_model(SpectrumModel::degenerate_ground(2), 1.0, t_max),
            EntropySurface<double>::from_model(custom, 1.5, t_max)};
}

} // namespace

TEST_CASE("partition_function")
{
    CHECK(partition_function(two_level(1.0), 1.0) == doctest::Approx(oracle::two_level_z(1.0, 1.0)).epsilon(1e-15));
    CHECK(oracle::two_level_z(1.0, 1.0) == doctest::Approx(1.367879).epsilon(1e-6));

    const auto dg = levels_at(SpectrumModel::degenerate_ground(2), 1.0, 2);
    CHECK(partition_function(dg, 1.0) == doctest::Approx(2.0 + kE).epsilon(1e-15));

    // High-temperature limit counts microstates.
    const auto s = make_spectrum({{0.0, 2}, {1.0, 1}, {4.0, 3}});
    CHECK(partition_function(s, std::numeric_limits<double>::infinity()) == 6.0);
    CHECK(partition_function(s, 1e12) == doctest::Approx(6.0));

    CHECK_THROWS_AS(partition_function(s, 0.0), ArgumentError);
    CHECK_THROWS_AS(partition_function(s, -1.0), ArgumentError);
}

TEST_CASE("gibbs_populations")
{
    const auto hot = gibbs_populations(two_level(1.0), std::numeric_limits<double>::infinity());
    CHECK(hot.populations(0) == 0.5);
    CHECK(hot.populations(1) == 0.5);

    const auto warm = gibbs_populations(two_level(1.0), 1.0);
    CHECK(warm.populations(0) == doctest::Approx(1.0 / (1.0 + kE)).epsilon(1e-15));
    CHECK(warm.populations(1) == doctest::Approx(kE / (1.0 + kE)).epsilon(1e-15));
    CHECK(warm.populations(0) == doctest::Approx(0.731059).epsilon(1e-6));
    REQUIRE(warm.temperature);
    CHECK(*warm.temperature == 1.0);

    const auto cold = gibbs_populations(make_spectrum({{0.0, 3}, {0.2, 1}, {0.5, 2}}), 0.0);
    CHECK(cold.populations(0) == 1.0);
    CHECK(cold.populations.tail(2).isZero(0.0));
    CHECK(*cold.temperature == 0.0);

    CHECK_THROWS_AS(gibbs_populations(two_level(1.0), -0.1), ArgumentError);
}

TEST_CASE("entropy")
{
    CHECK(entropy(gibbs_populations(two_level(1.0), 0.0)) == 0.0);
    const auto w2 = gibbs_populations(levels_at(SpectrumModel::degenerate_ground(2), 1.0, 2), 0.0);
    CHECK(entropy(w2) == std::log(2.0));
    CHECK(entropy(gibbs_populations(two_level(1.0), 1.0)) ==
          doctest::Approx(oracle::two_level_entropy(1.0, 1.0)).epsilon(1e-14));
    CHECK(oracle::two_level_entropy(1.0, 1.0) == doctest::Approx(0.582203).epsilon(1e-6));
}

TEST_CASE("specific_heat")
{
    CHECK(specific_heat(two_level(1.0), 1.0) == doctest::Approx(kE / ((1 + kE) * (1 + kE))).epsilon(1e-14));
    CHECK(specific_heat(two_level(1.0), 1.0) == doctest::Approx(0.196612).epsilon(1e-6));
    CHECK(specific_heat(two_level(1.0), 1e8) < 1e-15);
    CHECK(specific_heat(two_level(1.0), 1e-3) == 0.0);
    CHECK(specific_heat(two_level(1.0), 0.02) < 1e-18);
    CHECK_THROWS_AS(specific_heat(two_level(1.0), 0.0), ArgumentError);

    for (double t : {0.05, 0.3, 1.0, 4.0, 30.0})
        CHECK(specific_heat(two_level(2.5), t) ==
              doctest::Approx(oracle::two_level_heat_capacity(2.5, t)).epsilon(1e-12));
}

TEST_CASE("entropy_via_integral: examples")
{
    const auto tl = EntropySurface<double>::from_model(SpectrumModel::two_level(), 1.0, 10.0);
    CHECK(entropy_via_integral(tl, 0.0) == 0.0);
    CHECK(entropy_via_integral(tl, 1.0) == doctest::Approx(oracle::two_level_entropy(1.0, 1.0)).epsilon(1e-9));

    const auto ho = EntropySurface<double>::from_model(SpectrumModel::harmonic(), 1.0, 1.0);
    CHECK(oracle::harmonic_entropy(1.0, 1.0) == doctest::Approx(1.0406518522564083).epsilon(1e-15));
    CHECK(std::abs(entropy_via_integral(ho, 1.0) - oracle::harmonic_entropy(1.0, 1.0)) < 1e-8);

    const auto dg = EntropySurface<double>::from_model(SpectrumModel::degenerate_ground(2), 1.0, 1.0);
    CHECK(entropy_via_integral(dg, 0.0) == std::log(2.0));
    CHECK_THROWS_AS(entropy_via_integral(dg, 1.0, 0.0), ArgumentError);
}

TEST_CASE("entropy-integral identity on a log grid for all families")
{
    constexpr double kQuadTol = 1e-9;
    for (const auto& surface : builtin_surfaces(100.0)) {
        for (int i = 0; i < 12; ++i) {
            const double t = std::pow(10.0, -3.0 + 5.0 * i / 11.0);
            const double direct = entropy(gibbs_populations(surface.spectrum(), t));
            CAPTURE(t);
            CHECK(std::abs(entropy_via_integral(surface, t, kQuadTol) - direct) <= kQuadTol + 1e-8);
        }
    }
}

TEST_CASE("EntropySurface: S(0) = ln W, monotone, excess matches direct entropy")
{
    for (const auto& surface : builtin_surfaces(30.0)) {
        const auto& s = surface.spectrum();
        CHECK(surface.zero_entropy() == std::log(static_cast<double>(s.ground_degeneracy())));
        CHECK(surface.entropy(0.0) == surface.zero_entropy());
        CHECK(surface.log_excess(0.0) == -std::numeric_limits<double>::infinity());
        double previous = surface.zero_entropy();
        for (int i = 0; i < 40; ++i) {
            const double t = std::pow(10.0, -1.5 + 3.0 * i / 39.0);
            const double direct = entropy(gibbs_populations(s, t));
            CHECK(surface.entropy(t) == doctest::Approx(direct).epsilon(1e-12));
            CHECK(direct > previous);
            previous = direct;
        }
    }
}

TEST_CASE("log_excess stays finite far below the double rounding floor")
{
    const EntropySurface<double> s(two_level(1.0));
    // At T = 1/1000 the excess ~ 1001 e^-1000 underflows, its logarithm does not.
    CHECK(s.log_excess(1e-3) == doctest::Approx(std::log(1001.0) - 1000.0).epsilon(1e-14));
    const EntropySurface<long double> wide(two_level(1.0).cast<long double>());
    const long double t = 1e-3000L;
    CHECK(static_cast<double>(wide.log_excess(t) / -1e3000L) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(wide.log_excess(t) < wide.log_excess(2 * t));
}

TEST_CASE("Boltzmann ratio identity per microstate")
{
    for (const auto& surface : builtin_surfaces(10.0)) {
        const auto& s = surface.spectrum();
        for (double t : {0.1, 1.0, 10.0}) {
            const auto st = gibbs_populations(s, t);
            const double ground = st.populations(0) / s.degeneracies(0);
            for (Index i = 1; i < s.size(); ++i) {
                const double ratio = (st.populations(i) / s.degeneracies(i)) / ground;
                CHECK(std::abs(ratio - std::exp(-s.energies(i) / t)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("specific heat positivity on all families")
{
    for (const auto& surface : builtin_surfaces(10.0)) {
        for (double t : {0.05, 0.2, 1.0, 5.0, 10.0})
            CHECK(surface.heat_capacity(t) > 0.0);
    }
}

TEST_CASE("nernst_check and planck_check")
{
    const auto ho = SpectrumModel::harmonic();
    CHECK(nernst_check(ho, 0.5, 3.0).holds);
    CHECK(nernst_check(SpectrumModel::two_level(), 1.0, 1.0).holds);

    const auto dg = SpectrumModel::degenerate_ground(1, {0.1, 10.0}, DegeneracySwitch{2.0, 2});
    const auto report = nernst_check(dg, 1.0, 3.0);
    CHECK_FALSE(report.holds);
    CHECK(report.zero_entropy_1 == 0.0);
    CHECK(report.zero_entropy_2 == std::log(2.0));

    CHECK(planck_check(ho, 1.0));
    CHECK_FALSE(planck_check(SpectrumModel::degenerate_ground(2), 1.0));
    CHECK(planck_check(SpectrumModel::box(), 1.0));

    const auto custom = SpectrumModel::custom({{0.0, {{0.0, 2}, {1.0, 1}}}, {1.0, {{0.0, 2}, {2.0, 1}}}});
    CHECK(nernst_check(custom, 0.0, 1.0).holds);
}

TEST_CASE("thermo in extended precision agrees with double")
{
    const auto s = levels_at(SpectrumModel::harmonic(), 0.7, 40);
    const auto w = s.cast<long double>();
    for (double t : {0.1, 1.0, 5.0}) {
        CHECK(static_cast<double>(entropy(gibbs_populations(w, static_cast<long double>(t)))) ==
              doctest::Approx(entropy(gibbs_populations(s, t))).epsilon(1e-13));
        CHECK(static_cast<double>(specific_heat(w, static_cast<long double>(t))) ==
              doctest::Approx(specific_heat(s, t)).epsilon(1e-12));
    }
}
