#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nernst/processes.hpp"
#include "oracles.hpp"

using namespace nernst;

namespace {

EntropySurface<double> two_level_surface(double gap)
{
    return EntropySurface<double>(levels_at(SpectrumModel::two_level(), gap, 2));
}

} // namespace

TEST_CASE("apply_adiabatic: scale family keeps the Gibbs form")
{
    const auto ho = SpectrumModel::harmonic();
    const auto start = gibbs_populations(levels_at(ho, 1.0, 40), 1.0);
    const auto end = apply_adiabatic(start, ho, 0.5);
    CHECK(end.populations == start.populations);
    REQUIRE(end.temperature);
    CHECK(*end.temperature == doctest::Approx(0.5).epsilon(1e-15));
    const auto gibbs = gibbs_populations(end.spectrum, 0.5);
    CHECK((end.populations - gibbs.populations).cwiseAbs().maxCoeff() <= 1e-12);

    const auto tl = SpectrumModel::two_level();
    const auto up = apply_adiabatic(gibbs_populations(levels_at(tl, 1.0, 2), 1.0), tl, 2.0);
    CHECK(*up.temperature == 2.0);
    CHECK((up.populations - gibbs_populations(up.spectrum, 2.0).populations).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("apply_adiabatic: ground state stays at T = 0")
{
    const auto box = SpectrumModel::box();
    const auto ground = gibbs_populations(levels_at(box, 1.0, 5), 0.0);
    const auto moved = apply_adiabatic(ground, box, 0.3);
    REQUIRE(moved.temperature);
    CHECK(*moved.temperature == 0.0);
    CHECK(moved.populations(0) == 1.0);
}

TEST_CASE("apply_adiabatic: non-scale target drops the label, populations untouched")
{
    const auto custom = SpectrumModel::custom({{0.0, {{0.0, 1}, {1.0, 1}, {2.0, 1}}},
                                               {1.0, {{0.0, 1}, {1.0, 1}, {5.0, 1}}}});
    const auto start = gibbs_populations(levels_at(custom, 0.0, 3), 0.7);
    const auto end = apply_adiabatic(start, custom, 1.0);
    CHECK_FALSE(end.temperature.has_value());
    CHECK(end.populations == start.populations);
    // Excited populations survive.
    CHECK(end.populations(2) > 0.0);
    const auto diag = ratio_temperature(end);
    REQUIRE(diag);
    CHECK(*diag == doctest::Approx(0.7));
}

TEST_CASE("apply_adiabatic: mismatched structure")
{
    const auto a = gibbs_populations(make_spectrum({{0.0, 1}, {1.0, 1}}), 1.0);
    CHECK_THROWS_AS(apply_adiabatic(a, make_spectrum({{0.0, 2}, {1.0, 1}})), StructureError);
    CHECK_THROWS_AS(apply_adiabatic(a, make_spectrum({{0.0, 1}, {1.0, 1}, {2.0, 1}})), StructureError);
}

TEST_CASE("apply_isothermal")
{
    const auto tl = SpectrumModel::two_level();
    const auto start = gibbs_populations(levels_at(tl, 1.0, 2), 1.0);
    const auto end = apply_isothermal(start, tl, 2.0, 1.0);
    const double e2 = std::exp(-2.0);
    CHECK(end.populations(0) == doctest::Approx(1.0 / (1.0 + e2)).epsilon(1e-15));
    CHECK(end.populations(1) == doctest::Approx(e2 / (1.0 + e2)).epsilon(1e-15));
    CHECK(isothermal_heat(start, end, 1.0) < 0.0);

    const auto same = apply_isothermal(start, tl, 1.0, 1.0);
    CHECK((same.populations - start.populations).cwiseAbs().maxCoeff() == 0.0);
    CHECK(isothermal_heat(start, same, 1.0) == 0.0);

    const auto dg = SpectrumModel::degenerate_ground(2);
    const auto warm = gibbs_populations(levels_at(dg, 1.0, 2), 3.0);
    const auto frozen = apply_isothermal(warm, dg, 1.0, 0.0);
    CHECK(frozen.populations(0) == 1.0);
    CHECK(entropy(warm) - entropy(frozen) == doctest::Approx(entropy(warm) - std::log(2.0)));
}

TEST_CASE("staircase: two-level scale pair halves T each round")
{
    const auto a = two_level_surface(1.0);
    const auto b = two_level_surface(2.0);
    const auto run = staircase(a, b, 1.0, 1e-3, 100);
    CHECK(run.steps == 10);
    CHECK(static_cast<double>(std::ceil(std::log2(1000.0))) == 10.0);
    CHECK(run.reached_target);
    CHECK_FALSE(run.reached_zero);
    for (const auto& r : run.rounds)
        CHECK(std::abs(r.t_end / std::pow(2.0, -static_cast<double>(r.index)) - 1.0) <= 1e-10);

    // Trace: initial + (isothermal, adiabatic) per round.
    CHECK(run.trace.size() == 21);
    for (std::size_t i = 1; i < run.trace.size(); ++i) {
        const auto& rec = run.trace.records[i];
        if (rec.kind == StepKind::Isothermal) {
            const auto& prev = run.trace.records[i - 1];
            CHECK(rec.heat == doctest::Approx(*rec.temperature * (rec.entropy - prev.entropy)));
        } else {
            CHECK(rec.kind == StepKind::Adiabatic);
            CHECK(rec.entropy == run.trace.records[i - 1].entropy);
            CHECK(rec.heat == 0.0);
        }
    }
}

TEST_CASE("staircase: geometric law for a general scale ratio")
{
    const auto ho = levels_at(SpectrumModel::harmonic(), 1.0, 60);
    const EntropySurface<double> a(ho);
    const double r = 1.7;
    const EntropySurface<double> b(ho.scaled(r));
    const double t0 = 1.0, target = 1e-2;
    const auto run = staircase(a, b, t0, target, 1000);
    CHECK(run.steps == static_cast<std::size_t>(std::ceil(std::log(t0 / target) / std::log(r))));
    for (const auto& round : run.rounds)
        CHECK(std::abs(round.t_end * std::pow(r, static_cast<double>(round.index)) - 1.0) <= 1e-10);
}

TEST_CASE("staircase: Nernst pair never reaches zero")
{
    const auto a = two_level_surface(1.0);
    const auto b = two_level_surface(2.0);
    const auto run = staircase(a, b, 1.0, 0.0, 200);
    CHECK(run.steps == 200);
    CHECK_FALSE(run.reached_zero);
    CHECK(run.final_temperature > 0.0);
    double previous = 1.0;
    for (const auto& round : run.rounds) {
        CHECK(round.t_end < previous);
        previous = round.t_end;
    }
}

TEST_CASE("staircase: extended precision keeps T > 0 for 10^4 rounds")
{
    const auto s = levels_at<long double>(SpectrumModel::two_level(), 1.0, 2);
    const EntropySurface<long double> a(s);
    const EntropySurface<long double> b(s.scaled(2.0L));
    StaircaseOptions options;
    options.record_trace = false;
    const auto run = staircase(a, b, 1.0L, 0.0L, 10000, options);
    CHECK(run.steps == 10000);
    CHECK_FALSE(run.reached_zero);
    CHECK(run.final_temperature > 0.0L);
    CHECK(static_cast<double>(std::log2(run.final_temperature)) == doctest::Approx(-10000.0).epsilon(1e-9));
}

TEST_CASE("staircase: violating pair lands exactly on T = 0")
{
    const auto a = EntropySurface<double>::from_model(SpectrumModel::degenerate_ground(2), 1.0, 1.0);
    const auto b = EntropySurface<double>::from_model(SpectrumModel::harmonic(), 1.0, 1.0);
    // The curves cross near T = 0.9, so start just below.
    const auto run = staircase(a, b, 0.8, 0.0, 1000);
    CHECK(run.reached_zero);
    CHECK(run.final_temperature == 0.0);

    // Oracle: crossing T* with S_harmonic(T*) = ln 2.
    const double t_star =
        oracle::bisect([](double t) { return oracle::harmonic_entropy(1.0, t) - std::log(2.0); }, 1e-3, 10.0);
    const auto& last = run.rounds.back();
    CHECK(last.t_start <= t_star * (1 + 1e-9));
    for (std::size_t i = 0; i + 1 < run.rounds.size(); ++i)
        CHECK(run.rounds[i].t_start > t_star);
    CHECK(run.steps <= 5);
}

TEST_CASE("staircase: argument and ordering errors")
{
    const auto a = two_level_surface(1.0);
    const auto b = two_level_surface(2.0);
    CHECK_THROWS_AS(staircase(b, a, 1.0, 0.0, 10), ProtocolError);
    CHECK_THROWS_AS(staircase(a, b, 0.0, 0.0, 10), ArgumentError);
    CHECK_THROWS_AS(staircase(a, b, 1.0, 2.0, 10), ArgumentError);
    CHECK_THROWS_AS(staircase(a, b, 1.0, 0.1, 0), ArgumentError);
}

TEST_CASE("run_protocol")
{
    const auto tl = SpectrumModel::two_level();
    const auto start = gibbs_populations(levels_at(tl, 1.0, 2), 1.0);

    const auto empty = run_protocol(tl, start, {});
    CHECK(empty.trace.size() == 1);
    CHECK(empty.trace.back().kind == StepKind::Initial);

    const auto round = run_protocol(tl, start, {IsothermalStep{2.0}, AdiabaticStep{1.0}});
    REQUIRE(round.final_state.temperature);
    CHECK(*round.final_state.temperature == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(round.trace.records[1].heat == doctest::Approx(1.0 * (round.trace.records[1].entropy - entropy(start))));
    CHECK(round.trace.records[2].entropy == round.trace.records[1].entropy);

    const auto measured = run_protocol(tl, start, {MeasureStep{7}});
    const auto& last = measured.trace.back();
    CHECK(last.kind == StepKind::Measure);
    CHECK(last.entropy == 0.0);
    const auto& p = measured.final_state.populations;
    CHECK(((p(0) == 1.0 && p(1) == 0.0) || (p(0) == 0.0 && p(1) == 1.0)));
    CHECK(measured.final_state.temperature.has_value() == (p(0) == 1.0));

    const auto thermal = run_protocol(tl, start, {ThermalizeStep{0.0}});
    CHECK(*thermal.final_state.temperature == 0.0);
    CHECK(thermal.trace.back().heat == doctest::Approx(-mean_energy(start)));
}

TEST_CASE("run_protocol: failing step aborts with the partial trace")
{
    const auto tl = SpectrumModel::two_level({0.5, 4.0});
    const auto start = gibbs_populations(levels_at(tl, 1.0, 2), 1.0);
    try {
        run_protocol(tl, start, {IsothermalStep{2.0}, AdiabaticStep{8.0}});
        FAIL("expected ProtocolAborted");
    } catch (const ProtocolAborted<double>& e) {
        CHECK(e.failed_step() == 2);
        CHECK(e.partial_trace().size() == 2);
        CHECK_THROWS_AS(std::rethrow_exception(e.cause()), DomainError);
    }

    const auto custom = SpectrumModel::custom({{0.0, {{0.0, 1}, {1.0, 1}, {2.0, 1}}},
                                               {1.0, {{0.0, 1}, {1.0, 1}, {5.0, 1}}}});
    const auto s = gibbs_populations(levels_at(custom, 0.0, 3), 1.0);
    // Non-scale adiabat clears the temperature, so an isothermal step has no bath.
    CHECK_THROWS_AS(run_protocol(custom, s, {AdiabaticStep{1.0}, IsothermalStep{0.0}}), ProtocolAborted<double>);
}

TEST_CASE("trace CSV")
{
    ProtocolTrace<double> trace;
    trace.records.push_back({0, StepKind::Initial, 1.0, 0.5, 0.25, 0.0, 0.0});
    trace.records.push_back({1, StepKind::Adiabatic, 2.0, std::nullopt, 0.25, 0.0, 0.1});
    std::ostringstream os;
    write_trace_csv(os, trace);
    CHECK(os.str() ==
          "step_index,kind,parameter,temperature,entropy,heat,work\n"
          "0,initial,1,0.5,0.25,0,0\n"
          "1,adiabatic,2,,0.25,0,0.10000000000000001\n");
}
