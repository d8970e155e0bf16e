#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qnd/oscillator.hpp"

using namespace qnd;

namespace {

// Closed form of sum n q^n / sum q^n over n = 0..N.
double truncated_geometric_mean(double q, std::size_t N) {
    const double n = static_cast<double>(N);
    return q * (1.0 - (n + 1.0) * std::pow(q, n) + n * std::pow(q, n + 1.0)) /
           ((1.0 - q) * (1.0 - std::pow(q, n + 1.0)));
}

} // namespace

TEST_CASE("bath_from_gamma substitutes directly") {
    const auto a = bath_from_gamma(1.0, 0.1);
    CHECK(a.emission_rate() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(a.absorption_rate() == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(a.boltzmann_ratio() == doctest::Approx(std::log(11.0)).epsilon(1e-14));
    CHECK(a.gamma() == doctest::Approx(1.0).epsilon(1e-15));

    const auto b = bath_from_gamma(1.0, 1.0);
    CHECK(b.emission_rate() == 1.0);
    CHECK(b.absorption_rate() == 2.0);
    CHECK(std::abs(b.boltzmann_ratio() - std::log(2.0)) < 1e-15);

    const auto c = bath_from_gamma(2.5, 0.05);
    CHECK(std::abs(c.n_thermal() - 0.05) <= 1e-12);
    CHECK(std::abs(c.emission_rate() / c.gamma() - 0.05) <= 1e-12);
}

TEST_CASE("bath_from_gamma rejects non-positive inputs") {
    CHECK_THROWS_AS(bath_from_gamma(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(bath_from_gamma(-1.0, 0.1), DomainError);
    CHECK_THROWS_AS(bath_from_gamma(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(bath_from_gamma(1.0, -0.2), DomainError);
}

TEST_CASE("from_boltzmann agrees with the canonical constructor") {
    const auto a = BathParams::from_boltzmann(std::log(11.0), 1.1);
    CHECK(a.emission_rate() == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(a.n_thermal() == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(a.gamma() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("bath invariants hold over random parameters") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> log_gamma(-3.0, 3.0);
    std::uniform_real_distribution<double> log_n(-4.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double g = std::exp(log_gamma(rng));
        const double n = std::exp(log_n(rng));
        const auto p = bath_from_gamma(g, n);
        CHECK(p.emission_rate() > 0.0);
        CHECK(p.absorption_rate() > p.emission_rate());
        CHECK(std::abs(p.emission_rate() / p.absorption_rate() - std::exp(-p.boltzmann_ratio())) <= 1e-12);
        CHECK(std::abs(p.n_thermal() - 1.0 / std::expm1(p.boltzmann_ratio())) <= 1e-12 * std::max(1.0, n));
        // extracting (gamma, n_thermal) and rebuilding is the identity
        const auto q = bath_from_gamma(p.gamma(), p.n_thermal());
        CHECK(std::abs(q.emission_rate() - p.emission_rate()) <= 1e-12 * p.emission_rate());
        CHECK(std::abs(q.absorption_rate() - p.absorption_rate()) <= 1e-12 * p.absorption_rate());
    }
}

TEST_CASE("thermal populations") {
    SUBCASE("two levels at ln 10") {
        const auto w = thermal_populations(BathParams::from_boltzmann(std::log(10.0), 1.0), 1);
        CHECK(w[0] == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
        CHECK(w[1] == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
    }
    SUBCASE("zero-temperature limit") {
        const auto w = thermal_populations(BathParams::from_boltzmann(50.0, 1.0), 6);
        CHECK(std::abs(w[0] - 1.0) <= 1e-12);
        for (std::size_t n = 1; n <= 6; ++n) CHECK(w[n] <= 1e-12);
    }
    SUBCASE("mean at ln 2, N = 30 matches the geometric series") {
        const auto w = thermal_populations(BathParams::from_boltzmann(std::log(2.0), 1.0), 30);
        const double oracle = truncated_geometric_mean(0.5, 30);
        CHECK(std::abs(mean_photon(w) - oracle) <= 1e-12);
        CHECK(std::abs(mean_photon(w) - 1.0) <= 1e-6);
    }
    SUBCASE("N = 0 is rejected") {
        CHECK_THROWS_AS(thermal_populations(bath_from_gamma(1.0, 0.1), 0), DomainError);
    }
}

TEST_CASE("tail mass bounds the truncation") {
    const auto p = bath_from_gamma(1.0, 0.1);
    CHECK(thermal_tail_mass(p, 40) < 1e-40);
    CHECK(thermal_tail_mass(p, 1) == doctest::Approx(1.0 / 121.0).epsilon(1e-12));
}

TEST_CASE("Thermal w_1 approximates n_thermal to second order") {
    for (double n : {0.02, 0.05, 0.1, 0.2}) {
        const auto w = thermal_populations(bath_from_gamma(1.0, n), 30);
        CHECK(std::abs(w[1] - n) <= 3.0 * n * n);
    }
}

TEST_CASE("pure levels and mean photon number") {
    CHECK(pure_level(0, 1) == PopulationVector({1.0, 0.0}));
    CHECK(pure_level(1, 1) == PopulationVector({0.0, 1.0}));
    CHECK(pure_level(2, 4) == PopulationVector({0.0, 0.0, 1.0, 0.0, 0.0}));
    CHECK(mean_photon(pure_level(0, 5)) == 0.0);
    CHECK(mean_photon(pure_level(3, 5)) == 3.0);
    CHECK_THROWS_AS(pure_level(5, 4), DomainError);
}

TEST_CASE("population vector validation") {
    CHECK_THROWS_AS(PopulationVector({1.0}), DomainError);
    CHECK_THROWS_AS(PopulationVector({0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(PopulationVector({1.1, -0.1}), DomainError);
    CHECK_NOTHROW(PopulationVector({0.5, 0.5 + 1e-10}));
}

TEST_CASE("generator rates") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto g1 = build_generator(p, 1);
    CHECK(g1.up_rate(0) == doctest::Approx(0.1));
    CHECK(g1.down_rate(1) == doctest::Approx(1.1));
    CHECK(g1.up_rate(1) == 0.0);
    CHECK(g1.down_rate(0) == 0.0);

    const auto g3 = build_generator(p, 3);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(g3.up_rate(n) == doctest::Approx(0.1 * static_cast<double>(n + 1)));
        CHECK(g3.down_rate(n + 1) == doctest::Approx(1.1 * static_cast<double>(n + 1)));
    }
}

TEST_CASE("generator conserves probability and satisfies detailed balance") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> log_n(-4.0, 0.5);
    std::uniform_int_distribution<std::size_t> trunc(1, 60);
    for (int i = 0; i < 150; ++i) {
        const auto p = bath_from_gamma(std::exp(log_n(rng)), std::exp(log_n(rng)));
        const std::size_t N = trunc(rng);
        const auto gen = build_generator(p, N);
        const std::vector<double> ones(N + 1, 1.0);
        for (double x : gen.apply_to_covector(ones)) {
            CHECK(std::abs(x) <= 1e-12 * gen.max_exit_rate());
        }
        const auto pi = thermal_populations(p, N);
        for (std::size_t n = 0; n < N; ++n) {
            const double forward = gen.up_rate(n) * pi[n];
            const double backward = gen.down_rate(n + 1) * pi[n + 1];
            CHECK(std::abs(forward - backward) <= 1e-12 * std::max(forward, 1.0));
        }
    }
}
