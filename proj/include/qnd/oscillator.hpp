// oscillator.hpp: thermal field oscillator: bath rates, Fock-diagonal populations,
// and the birth-death relaxation generator.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qnd {

// Thrown whenever a constructor or operation receives arguments outside its domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Coupling of the oscillator to its thermostat.
//
// emission   B_e : rate of thermostat-induced photon creation
// absorption B_a : rate of photon loss into the thermostat
// gamma          : B_a - B_e, the relaxation rate of the mean occupancy
// n_thermal      : B_e / gamma = 1 / (exp(boltzmann_ratio) - 1)
//
// Invariants (checked on construction): 0 < B_e < B_a, detailed balance
// B_e/B_a = exp(-boltzmann_ratio) to 1e-12.
class BathParams {
public:
    // Canonical constructor from the relaxation rate and thermal occupancy.
    static BathParams from_gamma(double gamma, double n_thermal);
    // Alternative parameterization by hbar*omega/theta and the absorption rate.
    static BathParams from_boltzmann(double boltzmann_ratio, double absorption_rate);
    // Bypasses the B_e > 0 invariant. Only the jump engine's absorbing-state
    // sanity check uses this; nothing else accepts degenerate rates.
    static BathParams unchecked_for_testing(double emission_rate, double absorption_rate);

    double emission_rate() const noexcept { return emission_; }
    double absorption_rate() const noexcept { return absorption_; }
    double boltzmann_ratio() const noexcept { return boltzmann_ratio_; }
    double gamma() const noexcept { return absorption_ - emission_; }
    double n_thermal() const noexcept { return n_thermal_; }

    // Thermal weight of level k in the two-level truncation used by the
    // closed-form formulas: <w_0> = 1 - n_thermal, <w_1> = n_thermal.
    double two_level_thermal_weight(int k) const;

private:
    BathParams(double emission, double absorption, double boltzmann_ratio, double n_thermal)
        : emission_(emission), absorption_(absorption),
          boltzmann_ratio_(boltzmann_ratio), n_thermal_(n_thermal) {}

    double emission_;
    double absorption_;
    double boltzmann_ratio_;
    double n_thermal_;
};

// Convenience alias for the canonical constructor.
BathParams bath_from_gamma(double gamma, double n_thermal);

// Diagonal of the density matrix in the Fock basis, levels 0..N.
class PopulationVector {
public:
    static constexpr double kNormTolerance = 1e-9;

    // Validates non-negativity, size >= 2 and |sum - 1| <= kNormTolerance.
    explicit PopulationVector(std::vector<double> weights);

    std::size_t truncation() const noexcept { return weights_.size() - 1; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t n) const { return weights_[n]; }
    std::span<const double> weights() const noexcept { return weights_; }

    friend bool operator==(const PopulationVector&, const PopulationVector&) = default;

private:
    std::vector<double> weights_;
};

PopulationVector thermal_populations(const BathParams& params, std::size_t truncation);
PopulationVector pure_level(std::size_t level, std::size_t truncation);
double mean_photon(const PopulationVector& pop) noexcept;

// Mass exp(-boltzmann_ratio * (N+1)) discarded by truncating the thermal state
// at level N, relative to the untruncated distribution.
double thermal_tail_mass(const BathParams& params, std::size_t truncation) noexcept;

double total_variation(const PopulationVector& a, const PopulationVector& b);

// Tridiagonal rate operator of the birth-death relaxation channel:
//   up   n -> n+1 at lambda_n = B_e (n+1),   n = 0..N-1
//   down n -> n-1 at mu_n     = B_a n,       n = 1..N
class BirthDeathGenerator {
public:
    BirthDeathGenerator(const BathParams& params, std::size_t truncation);

    std::size_t truncation() const noexcept { return up_.size(); }
    // lambda_n for n in [0, N); zero at n = N.
    double up_rate(std::size_t n) const noexcept { return n < up_.size() ? up_[n] : 0.0; }
    // mu_n for n in [1, N]; zero at n = 0.
    double down_rate(std::size_t n) const noexcept { return n >= 1 && n <= down_.size() ? down_[n - 1] : 0.0; }
    double exit_rate(std::size_t n) const noexcept { return up_rate(n) + down_rate(n); }
    double max_exit_rate() const noexcept;

    // (Q^T v)_n: the generator acting on a covector. Zero for the all-ones covector.
    std::vector<double> apply_to_covector(std::span<const double> v) const;
    // Q w: time derivative of the populations w.
    std::vector<double> apply(std::span<const double> w) const;

private:
    std::vector<double> up_;
    std::vector<double> down_;
};

BirthDeathGenerator build_generator(const BathParams& params, std::size_t truncation);

} // namespace qnd
