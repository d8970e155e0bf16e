#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "qnd/protocol.hpp"
#include "qnd/statistics.hpp"

using namespace qnd;

namespace {

SchedulePtr fine_schedule(double dt, std::size_t steps, std::size_t truncation) {
    return std::make_shared<const MeasurementSchedule>(dt, steps, ProjectorPartition::fine(truncation));
}

// Two-level chain: probability of reading level k again dt after a reading of k.
double two_level_stay(double be, double ba, int k, double dt) {
    const double leave_rate = k == 0 ? be : ba;
    return 1.0 - leave_rate / (be + ba) * (1.0 - std::exp(-(be + ba) * dt));
}

double frequency_of(const std::vector<MeasurementRecord>& records, std::size_t step, std::uint32_t bin) {
    std::size_t hits = 0;
    for (const auto& r : records) hits += r.outcomes[step] == bin ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

} // namespace

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(MeasurementSchedule(0.0, 5, ProjectorPartition::fine(1)), DomainError);
    CHECK_THROWS_AS(MeasurementSchedule(0.1, 0, ProjectorPartition::fine(1)), DomainError);
    const MeasurementSchedule s(0.01, 100, ProjectorPartition::fine(3));
    CHECK(s.duration() == doctest::Approx(1.0));
    CHECK(s.truncation() == 3);
}

TEST_CASE("Lüders engine: long intervals forget the initial level") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto sched = fine_schedule(20.0, 4, 1);
    const auto records = run_ensemble(p, sched, pure_level(0, 1), 40000, 11, Engine::luders);
    const double pi1 = 0.1 / 1.2; // stationary occupancy of level 1 of the two-level chain
    const double sigma = std::sqrt(pi1 * (1 - pi1) / 40000.0);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(frequency_of(records, i, 1) - pi1) <= 4.0 * sigma);
    }
}

TEST_CASE("Lüders engine: single step from level 1") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const double dt = 0.3;
    const auto records = run_ensemble(p, fine_schedule(dt, 1, 1), pure_level(1, 1), 50000, 5, Engine::luders);
    const double stay = two_level_stay(0.1, 1.1, 1, dt);
    const double sigma = std::sqrt(stay * (1 - stay) / 50000.0);
    CHECK(std::abs(frequency_of(records, 0, 1) - stay) <= 3.0 * sigma);
}

TEST_CASE("Lüders engine: survival in level 0 under quasicontinuous readout") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto records = run_ensemble(p, fine_schedule(0.01, 100, 1), pure_level(0, 1), 20000, 3, Engine::luders);
    const auto curve = estimate_survival(records, 0);
    const double exact = std::pow(two_level_stay(0.1, 1.1, 0, 0.01), 100);
    CHECK(std::abs(curve.survival.back() - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / 20000.0));
    CHECK(std::abs(exact - exact_sampled_survival(p, 1, 0, 0.01, 100).back()) <= 1e-12);
}

TEST_CASE("Lüders engine: coarse partitions and mixed initial states") {
    const auto p = bath_from_gamma(1.0, 0.5);
    const auto sched = std::make_shared<const MeasurementSchedule>(0.2, 50, ProjectorPartition(4, {{0}, {1, 2, 3, 4}}));
    const auto rec = run_trajectory_luders(p, sched, thermal_populations(p, 4), {9, 0});
    CHECK(rec.outcomes.size() == 50);
    CHECK_FALSE(rec.initial_level.has_value());
    for (auto o : rec.outcomes) CHECK(o < 2);
    CHECK_THROWS_AS(run_trajectory_luders(p, sched, pure_level(0, 3), {9, 0}), DomainError);
}

TEST_CASE("jump engine: no upward rate means level 0 is absorbing") {
    const auto p = BathParams::unchecked_for_testing(0.0, 1.0);
    const auto rec = run_trajectory_gillespie(p, fine_schedule(0.5, 200, 3), 0, {1, 2});
    CHECK(std::all_of(rec.outcomes.begin(), rec.outcomes.end(), [](auto o) { return o == 0; }));
    CHECK_THROWS_AS(bath_from_gamma(1.0, 0.0), DomainError);
}

TEST_CASE("jump engine: holding time in level 1 is exponential with rate B_a") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const double dt = 0.01;
    const auto sched = fine_schedule(dt, 1600, 1);
    const GillespieEngine engine(p, sched);
    const int runs = 100000;
    double sum = 0.0;
    for (int i = 0; i < runs; ++i) {
        const auto rec = engine.run(pure_level(1, 1), {77, static_cast<std::uint64_t>(i)});
        const auto it = std::find(rec.outcomes.begin(), rec.outcomes.end(), 0u);
        REQUIRE(it != rec.outcomes.end());
        const double index = static_cast<double>(it - rec.outcomes.begin()) + 1.0;
        sum += (index - 0.5) * dt;
    }
    const double mean = sum / runs;
    const double expected = 1.0 / 1.1;
    CHECK(std::abs(mean - expected) <= 3.0 * expected / std::sqrt(static_cast<double>(runs)));
}

TEST_CASE("jump engine: rejects coarse partitions") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto sched = std::make_shared<const MeasurementSchedule>(0.1, 10, ProjectorPartition(2, {{0}, {1, 2}}));
    CHECK_THROWS_AS(GillespieEngine(p, sched), DomainError);
    CHECK_THROWS_AS(run_ensemble(p, sched, pure_level(0, 2), 5, 0, Engine::gillespie), DomainError);
}

TEST_CASE("jump engine draws a mixed initial level from its own stream") {
    const auto p = bath_from_gamma(1.0, 0.3);
    const auto pi = thermal_populations(p, 6);
    const auto records = run_ensemble(p, fine_schedule(1e-6, 1, 6), pi, 40000, 8, Engine::gillespie);
    for (std::uint32_t level = 0; level < 3; ++level) {
        const double sigma = std::sqrt(pi[level] * (1 - pi[level]) / 40000.0);
        CHECK(std::abs(frequency_of(records, 0, level) - pi[level]) <= 4.0 * sigma);
    }
}

TEST_CASE("engines agree on per-step marginals") {
    const auto p = bath_from_gamma(1.0, 0.2);
    const auto sched = fine_schedule(0.05, 40, 10);
    const std::size_t n = 20000;
    const auto a = run_ensemble(p, sched, pure_level(0, 10), n, 1, Engine::luders);
    const auto b = run_ensemble(p, sched, pure_level(0, 10), n, 2, Engine::gillespie);
    for (std::size_t step : {0u, 4u, 19u, 39u}) {
        const double fa = frequency_of(a, step, 1);
        const double fb = frequency_of(b, step, 1);
        const double sigma = std::sqrt((fa * (1 - fa) + fb * (1 - fb)) / static_cast<double>(n));
        CHECK(std::abs(fa - fb) <= 4.0 * sigma);
    }
}

TEST_CASE("ensemble determinism") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto sched = fine_schedule(0.05, 60, 5);
    for (Engine engine : {Engine::luders, Engine::gillespie}) {
        const auto single = engine == Engine::luders
                                ? run_trajectory_luders(p, sched, pure_level(1, 5), {123, 0})
                                : run_trajectory_gillespie(p, sched, 1, {123, 0});
        const auto one = run_ensemble(p, sched, pure_level(1, 5), 1, 123, engine);
        CHECK(one.front() == single);

        const auto serial = run_ensemble(p, sched, pure_level(1, 5), 301, 123, engine, 1);
        const auto again = run_ensemble(p, sched, pure_level(1, 5), 301, 123, engine, 1);
        const auto parallel = run_ensemble(p, sched, pure_level(1, 5), 301, 123, engine, 4);
        CHECK(serial == again);
        CHECK(serial == parallel);
        for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].seed.index == i);
    }
}

TEST_CASE("disjoint index ranges produce non-colliding streams") {
    std::set<std::uint64_t> first;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        auto rng = make_stream(5, i);
        for (int k = 0; k < 4; ++k) first.insert(rng());
    }
    std::size_t collisions = 0;
    for (std::uint64_t i = 2000; i < 4000; ++i) {
        auto rng = make_stream(5, i);
        for (int k = 0; k < 4; ++k) collisions += first.count(rng());
    }
    CHECK(collisions == 0);

    // Outcome sequences of 64 near-fair readings: expected coincident pairs ~ 1e6 * 2^-55.
    const auto p = bath_from_gamma(1.0, 10.0);
    const auto sched = fine_schedule(5.0, 64, 1);
    const auto a = run_ensemble(p, sched, pure_level(0, 1), 1000, 5, Engine::luders);
    std::set<std::vector<std::uint32_t>> seen;
    for (const auto& r : a) seen.insert(r.outcomes);
    std::size_t repeats = 0;
    for (std::uint64_t i = 1000; i < 2000; ++i) {
        repeats += seen.count(run_trajectory_luders(p, sched, pure_level(0, 1), {5, i}).outcomes);
    }
    CHECK(repeats == 0);
}

TEST_CASE("survival_product") {
    const auto p = bath_from_gamma(1.0, 0.1);
    CHECK(survival_product(p, 0, 0.37, 1) == doctest::Approx(two_level_population(p, 0, 0.37)).epsilon(1e-15));
    CHECK(survival_product(p, 1, 0.37, 1) == doctest::Approx(two_level_population(p, 1, 0.37)).epsilon(1e-15));
    CHECK(std::abs(survival_product(p, 0, 0.01, 100) - 0.905243601771608) <= 1e-12);
    CHECK(std::abs(survival_product(p, 0, 1e-5, 100000) - std::exp(-0.1)) <= 1e-6);
    CHECK_THROWS_AS(survival_product(p, 2, 0.1, 3), DomainError);
    CHECK_THROWS_AS(survival_product(p, 0, 0.0, 3), DomainError);
    CHECK_THROWS_AS(survival_product(p, 0, 0.1, 0), DomainError);
}

TEST_CASE("survival_product is a renewal product") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> count(1, 500);
    for (int c = 0; c < 200; ++c) {
        const auto p = bath_from_gamma(0.1 + 3 * unit(rng), 0.01 + 0.9 * unit(rng));
        const int k = c % 2;
        const double dt = 0.001 + 0.2 * unit(rng);
        const std::size_t a = count(rng), b = count(rng);
        const double whole = survival_product(p, k, dt, a + b);
        const double parts = survival_product(p, k, dt, a) * survival_product(p, k, dt, b);
        CHECK(std::abs(whole - parts) <= 8.0 * std::numeric_limits<double>::epsilon() * whole);
    }
}

TEST_CASE("survival_exponential and the quasicontinuous limit") {
    const auto p = bath_from_gamma(1.0, 0.1);
    CHECK(survival_exponential(p, 0, 0.0) == 1.0);
    CHECK(survival_exponential(p, 0, 1.0) == doctest::Approx(0.9048374).epsilon(1e-7));
    CHECK(survival_exponential(p, 1, 1.0) == doctest::Approx(0.4065697).epsilon(1e-7));

    double previous = INFINITY;
    for (double x : {0.1, 0.01, 0.001}) {
        const auto m = static_cast<std::size_t>(std::llround(1.0 / x));
        const double gap = std::abs(survival_product(p, 0, x, m) - survival_exponential(p, 0, 1.0));
        CHECK(gap < previous);
        CHECK(gap <= x);
        previous = gap;
    }
}

TEST_CASE("zeno_times") {
    auto r = zeno_times(bath_from_gamma(1.0, 0.1));
    CHECK(r.tau == doctest::Approx(1.0));
    CHECK(r.tau_0 == doctest::Approx(10.0));
    CHECK(r.tau_1 == doctest::Approx(1.0 / 0.9));
    CHECK(r.slowdown_0 == doctest::Approx(10.0));
    CHECK_FALSE(r.domain_warning.has_value());

    r = zeno_times(bath_from_gamma(1.0, 0.5));
    CHECK(r.tau_0 == doctest::Approx(2.0));
    CHECK(r.tau_1 == doctest::Approx(2.0));

    r = zeno_times(bath_from_gamma(2.0, 0.1));
    CHECK(r.tau == doctest::Approx(0.5));
    CHECK(r.tau_0 == doctest::Approx(5.0));

    for (double n : {0.01, 0.3, 0.7, 0.99}) {
        r = zeno_times(bath_from_gamma(1.0, n));
        CHECK(r.slowdown_0 > 1.0);
        CHECK(r.slowdown_1 > 1.0);
        CHECK(r.slowdown_0 == doctest::Approx(1.0 / n));
    }

    r = zeno_times(bath_from_gamma(1.0, 1.5));
    CHECK(r.domain_warning.has_value());
    CHECK(r.tau_1 < 0.0);
}

TEST_CASE("exact sampled survival from level 0 decays at the emission rate as dt shrinks") {
    const auto p = bath_from_gamma(1.0, 0.1);
    for (double dt : {0.1, 0.01, 0.001}) {
        const auto m = static_cast<std::size_t>(std::llround(1.0 / dt));
        const double s = exact_sampled_survival(p, 40, 0, dt, m).back();
        CHECK(std::abs(-std::log(s) - 0.1) <= 0.1 * 0.6 * dt * 1.1 + 1e-12);
    }
}
