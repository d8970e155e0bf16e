#include "qnd/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qnd {

namespace {

constexpr double kAlgebraTolerance = 1e-12;

void check_bath_invariants(double emission, double absorption, double ratio, double n_thermal) {
    if (!(emission > 0.0) || !(absorption > emission) || !std::isfinite(absorption)) {
        throw DomainError("bath rates must satisfy 0 < B_e < B_a");
    }
    const double scale = std::max(1.0, n_thermal);
    if (std::abs(emission / absorption - std::exp(-ratio)) > kAlgebraTolerance ||
        std::abs(n_thermal - emission / (absorption - emission)) > kAlgebraTolerance * scale ||
        std::abs(n_thermal - 1.0 / std::expm1(ratio)) > kAlgebraTolerance * scale) {
        throw DomainError("bath parameters violate detailed balance");
    }
}

} // namespace

BathParams BathParams::from_gamma(double gamma, double n_thermal) {
    if (!(gamma > 0.0) || !(n_thermal > 0.0) || !std::isfinite(gamma) || !std::isfinite(n_thermal)) {
        throw DomainError("bath_from_gamma requires gamma > 0 and n_thermal > 0");
    }
    const double emission = gamma * n_thermal;
    const double absorption = gamma * (1.0 + n_thermal);
    const double ratio = std::log1p(1.0 / n_thermal);
    check_bath_invariants(emission, absorption, ratio, n_thermal);
    return BathParams(emission, absorption, ratio, n_thermal);
}

BathParams BathParams::from_boltzmann(double boltzmann_ratio, double absorption_rate) {
    if (!(boltzmann_ratio > 0.0) || !(absorption_rate > 0.0) || !std::isfinite(boltzmann_ratio)) {
        throw DomainError("from_boltzmann requires boltzmann_ratio > 0 and B_a > 0");
    }
    const double emission = absorption_rate * std::exp(-boltzmann_ratio);
    const double n_thermal = 1.0 / std::expm1(boltzmann_ratio);
    check_bath_invariants(emission, absorption_rate, boltzmann_ratio, n_thermal);
    return BathParams(emission, absorption_rate, boltzmann_ratio, n_thermal);
}

BathParams BathParams::unchecked_for_testing(double emission_rate, double absorption_rate) {
    if (!(emission_rate >= 0.0) || !(absorption_rate > emission_rate)) {
        throw DomainError("unchecked_for_testing still requires 0 <= B_e < B_a");
    }
    const double gamma = absorption_rate - emission_rate;
    const double ratio = emission_rate > 0.0 ? std::log(absorption_rate / emission_rate)
                                             : std::numeric_limits<double>::infinity();
    return BathParams(emission_rate, absorption_rate, ratio, emission_rate / gamma);
}

double BathParams::two_level_thermal_weight(int k) const {
    switch (k) {
    case 0: return 1.0 - n_thermal_;
    case 1: return n_thermal_;
    default: throw DomainError("two-level index must be 0 or 1, got " + std::to_string(k));
    }
}

BathParams bath_from_gamma(double gamma, double n_thermal) {
    return BathParams::from_gamma(gamma, n_thermal);
}

PopulationVector::PopulationVector(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.size() < 2) {
        throw DomainError("population vector needs at least two levels");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DomainError("population weights must be finite and non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
        throw DomainError("population weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

PopulationVector thermal_populations(const BathParams& params, std::size_t truncation) {
    if (truncation == 0) {
        throw DomainError("thermal_populations needs N >= 1");
    }
    std::vector<double> w(truncation + 1);
    const double ratio = params.boltzmann_ratio();
    for (std::size_t n = 0; n <= truncation; ++n) {
        w[n] = std::exp(-ratio * static_cast<double>(n));
    }
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) {
        x /= z;
    }
    return PopulationVector(std::move(w));
}

PopulationVector pure_level(std::size_t level, std::size_t truncation) {
    if (truncation == 0) {
        throw DomainError("pure_level needs N >= 1");
    }
    if (level > truncation) {
        throw DomainError("level " + std::to_string(level) + " exceeds truncation " +
                          std::to_string(truncation));
    }
    std::vector<double> w(truncation + 1, 0.0);
    w[level] = 1.0;
    return PopulationVector(std::move(w));
}

double mean_photon(const PopulationVector& pop) noexcept {
    double mean = 0.0;
    for (std::size_t n = 1; n < pop.size(); ++n) {
        mean += static_cast<double>(n) * pop[n];
    }
    return mean;
}

double thermal_tail_mass(const BathParams& params, std::size_t truncation) noexcept {
    return std::exp(-params.boltzmann_ratio() * static_cast<double>(truncation + 1));
}

double total_variation(const PopulationVector& a, const PopulationVector& b) {
    if (a.size() != b.size()) {
        throw DomainError("total_variation: truncation mismatch");
    }
    double tv = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        tv += std::abs(a[n] - b[n]);
    }
    return 0.5 * tv;
}

BirthDeathGenerator::BirthDeathGenerator(const BathParams& params, std::size_t truncation) {
    if (truncation == 0) {
        throw DomainError("generator needs N >= 1");
    }
    up_.resize(truncation);
    down_.resize(truncation);
    for (std::size_t n = 0; n < truncation; ++n) {
        up_[n] = params.emission_rate() * static_cast<double>(n + 1);
        down_[n] = params.absorption_rate() * static_cast<double>(n + 1);
    }
}

double BirthDeathGenerator::max_exit_rate() const noexcept {
    double best = 0.0;
    for (std::size_t n = 0; n <= truncation(); ++n) {
        best = std::max(best, exit_rate(n));
    }
    return best;
}

std::vector<double> BirthDeathGenerator::apply_to_covector(std::span<const double> v) const {
    const std::size_t size = truncation() + 1;
    if (v.size() != size) {
        throw DomainError("covector size does not match generator");
    }
    std::vector<double> out(size);
    for (std::size_t n = 0; n < size; ++n) {
        double acc = -exit_rate(n) * v[n];
        if (n + 1 < size) acc += up_rate(n) * v[n + 1];
        if (n >= 1) acc += down_rate(n) * v[n - 1];
        out[n] = acc;
    }
    return out;
}

std::vector<double> BirthDeathGenerator::apply(std::span<const double> w) const {
    const std::size_t size = truncation() + 1;
    if (w.size() != size) {
        throw DomainError("population size does not match generator");
    }
    std::vector<double> out(size);
    for (std::size_t n = 0; n < size; ++n) {
        double acc = -exit_rate(n) * w[n];
        if (n >= 1) acc += up_rate(n - 1) * w[n - 1];
        if (n + 1 < size) acc += down_rate(n + 1) * w[n + 1];
        out[n] = acc;
    }
    return out;
}

BirthDeathGenerator build_generator(const BathParams& params, std::size_t truncation) {
    return BirthDeathGenerator(params, truncation);
}

} // namespace qnd
