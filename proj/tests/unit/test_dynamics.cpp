#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qnd/dynamics.hpp"

using namespace qnd;

namespace {

// exp(tQ) for the two-level chain, started in level 0: w_1(t).
double two_level_exact_w1_from_0(double be, double ba, double t) {
    return be / (be + ba) * (1.0 - std::exp(-(be + ba) * t));
}

double two_level_exact_w1_from_1(double be, double ba, double t) {
    return be / (be + ba) + ba / (be + ba) * std::exp(-(be + ba) * t);
}

// Dense oracle: simple explicit Taylor series of exp(tQ) with scaling and squaring.
std::vector<double> taylor_expm_apply(const BirthDeathGenerator& gen, std::vector<double> w, double t) {
    const int squarings = 12;
    const double h = t / std::pow(2.0, squarings);
    const std::size_t n = w.size();
    // build dense Q
    std::vector<double> q(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        q[i * n + i] = -gen.exit_rate(i);
        if (i + 1 < n) q[(i + 1) * n + i] = gen.up_rate(i);
        if (i >= 1) q[(i - 1) * n + i] = gen.down_rate(i);
    }
    // E = sum_k (hQ)^k / k!
    std::vector<double> e(n * n, 0.0), term(n * n, 0.0), tmp(n * n);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = term[i * n + i] = 1.0;
    auto mul = [n](const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& c) {
        std::fill(c.begin(), c.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    };
    std::vector<double> hq(q);
    for (double& x : hq) x *= h;
    for (int k = 1; k <= 20; ++k) {
        mul(term, hq, tmp);
        for (std::size_t i = 0; i < n * n; ++i) term[i] = tmp[i] / k;
        for (std::size_t i = 0; i < n * n; ++i) e[i] += term[i];
    }
    for (int s = 0; s < squarings; ++s) {
        mul(e, e, tmp);
        e.swap(tmp);
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += e[i * n + j] * w[j];
    return out;
}

} // namespace

TEST_CASE("propagate: zero duration is the identity") {
    const auto p = bath_from_gamma(1.0, 0.3);
    const auto gen = build_generator(p, 8);
    const auto w = PopulationVector({0.1, 0.2, 0.3, 0.0, 0.0, 0.15, 0.05, 0.1, 0.1});
    CHECK(propagate(gen, w, 0.0) == w);
}

TEST_CASE("propagate: two-level chain matches the closed-form exponential") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto gen = build_generator(p, 1);
    for (double t : {0.001, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0}) {
        const auto w = propagate(gen, pure_level(0, 1), t);
        CHECK(std::abs(w[1] - two_level_exact_w1_from_0(0.1, 1.1, t)) <= 1e-12);
        const auto v = propagate(gen, pure_level(1, 1), t);
        CHECK(std::abs(v[1] - two_level_exact_w1_from_1(0.1, 1.1, t)) <= 1e-12);
    }
}

TEST_CASE("propagate: agrees with a dense Taylor exponential") {
    const auto p = bath_from_gamma(0.7, 0.4);
    const auto gen = build_generator(p, 12);
    std::vector<double> w0(13, 0.0);
    w0[2] = 0.5;
    w0[7] = 0.5;
    for (double t : {0.05, 0.7, 4.0}) {
        const auto got = propagate(gen, PopulationVector(w0), t);
        const auto want = taylor_expm_apply(gen, w0, t);
        for (std::size_t n = 0; n < 13; ++n) CHECK(std::abs(got[n] - want[n]) <= 1e-11);
    }
}

TEST_CASE("propagate: errors") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto gen = build_generator(p, 3);
    CHECK_THROWS_AS(propagate(gen, pure_level(0, 4), 1.0), DomainError);
    CHECK_THROWS_AS(propagate(gen, pure_level(0, 3), -0.1), DomainError);
}

TEST_CASE("propagate: mean follows the relaxation law on a long ladder") {
    for (double nth : {0.05, 0.1, 0.3, 0.5}) {
        const auto p = bath_from_gamma(1.0, nth);
        const auto gen = build_generator(p, 40);
        for (double t = 0.0; t <= 5.0; t += 0.25) {
            const double numeric = mean_photon(propagate(gen, pure_level(0, 40), t));
            CHECK(std::abs(numeric - mean_relaxation(p, 0.0, t)) <= 1e-8);
        }
    }
}

TEST_CASE("propagate: property suite") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> trunc(1, 30);
    for (int c = 0; c < 120; ++c) {
        const auto p = bath_from_gamma(0.2 + 2.0 * unit(rng), 0.01 + 0.8 * unit(rng));
        const std::size_t N = trunc(rng);
        const auto gen = build_generator(p, N);
        std::vector<double> raw(N + 1);
        double sum = 0.0;
        for (double& x : raw) sum += (x = unit(rng) < 0.3 ? 0.0 : unit(rng));
        if (sum == 0.0) raw[0] = sum = 1.0;
        for (double& x : raw) x /= sum;
        const PopulationVector w(raw);
        const double s = 3.0 * unit(rng);
        const double t = 3.0 * unit(rng);

        const auto direct = propagate(gen, w, s + t);
        const auto split = propagate(gen, propagate(gen, w, s), t);
        CHECK(total_variation(direct, split) <= 1e-9);

        double norm = 0.0;
        for (double x : direct.weights()) {
            CHECK(x >= 0.0);
            norm += x;
        }
        CHECK(std::abs(norm - 1.0) <= 1e-9);

        const auto pi = thermal_populations(p, N);
        CHECK(total_variation(propagate(gen, pi, s + t), pi) <= 1e-10);
    }
}

TEST_CASE("propagate: very long durations are chunked without underflow") {
    const auto p = bath_from_gamma(1.0, 0.2);
    const auto gen = build_generator(p, 40);
    const auto w = propagate(gen, pure_level(5, 40), 500.0);
    CHECK(total_variation(w, thermal_populations(p, 40)) <= 1e-10);
}

TEST_CASE("transition matrix columns are propagated unit vectors") {
    const auto p = bath_from_gamma(1.0, 0.1);
    const auto gen = build_generator(p, 6);
    const TransitionMatrix step(gen, 0.3);
    for (std::size_t j = 0; j <= 6; ++j) {
        const auto col = propagate(gen, pure_level(j, 6), 0.3);
        double sum = 0.0;
        for (std::size_t i = 0; i <= 6; ++i) {
            CHECK(step.at(i, j) == col[i]);
            sum += step.at(i, j);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("mean_relaxation") {
    const auto p = bath_from_gamma(1.0, 0.1);
    CHECK(mean_relaxation(p, 0.1, 3.7) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(mean_relaxation(p, 0.0, 1.0) == doctest::Approx(0.0632121).epsilon(1e-6));
    CHECK(mean_relaxation(p, 1.0, 1.0) == doctest::Approx(0.4310914).epsilon(1e-6));
    CHECK_THROWS_AS(mean_relaxation(p, -0.5, 1.0), DomainError);
    CHECK_THROWS_AS(mean_relaxation(p, 0.5, -1.0), DomainError);
}

TEST_CASE("two_level_population") {
    const auto p = bath_from_gamma(1.0, 0.1);
    CHECK(two_level_population(p, 0, 0.0) == 1.0);
    CHECK(two_level_population(p, 1, 0.0) == 1.0);
    CHECK(two_level_population(p, 0, 1.0) == doctest::Approx(0.9367879).epsilon(1e-6));
    CHECK(std::abs((1.0 - two_level_population(p, 1, 60.0)) - 0.9) <= 1e-12);
    CHECK(std::abs(two_level_population(p, 0, 1.0) - (1.0 - mean_relaxation(p, 0.0, 1.0))) <= 1e-15);
    CHECK_THROWS_AS(two_level_population(p, 2, 1.0), DomainError);
}

TEST_CASE("closed-form two-level relaxation versus the exact chain differ at first order") {
    for (double nth : {0.01, 0.05, 0.1, 0.2}) {
        const auto p = bath_from_gamma(1.0, nth);
        const auto gen = build_generator(p, 1);
        for (double t = 0.0; t <= 5.0; t += 0.1) {
            // start in level 1, compare the population of level 1
            const double analytic = two_level_population(p, 1, t);
            const double exact = propagate(gen, pure_level(1, 1), t)[1];
            CHECK(std::abs(analytic - exact) <= 2.5 * nth);
        }
    }
}
