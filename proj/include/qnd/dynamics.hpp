// dynamics.hpp: relaxation of Fock populations between measurements.
//
// Two evolution modes are kept apart on purpose:
//   exact-chain    propagate / TransitionMatrix: exp(t Q) for the birth-death generator
//   closed-form    mean_relaxation / two_level_population: closed forms in gamma t

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qnd/oscillator.hpp"

namespace qnd {

// Neglected Poisson tail of the uniformization series, in total variation.
inline constexpr double kUniformizationTolerance = 1e-12;

// exp(duration * Q) applied to pop, computed by uniformization.
PopulationVector propagate(const BirthDeathGenerator& gen, const PopulationVector& pop, double duration);

// Dense column-stochastic matrix exp(duration * Q). Column j holds the
// populations reached at `duration` from pure level j.
class TransitionMatrix {
public:
    TransitionMatrix(const BirthDeathGenerator& gen, double duration);

    std::size_t size() const noexcept { return size_; }
    double duration() const noexcept { return duration_; }
    double at(std::size_t to, std::size_t from) const noexcept { return data_[from * size_ + to]; }
    std::span<const double> column(std::size_t from) const noexcept {
        return {data_.data() + from * size_, size_};
    }
    // out = P w; out must have size() elements. Zero entries of w are skipped.
    void apply(std::span<const double> w, std::span<double> out) const;

private:
    std::size_t size_;
    double duration_;
    std::vector<double> data_; // column-major
};

// Mean occupancy relaxing towards n_thermal at rate gamma.
double mean_relaxation(const BathParams& params, double initial_mean, double t);

// Closed-form two-level population w_k(t) for a start in pure level k:
//   1 - <w_kbar>_thermal (1 - exp(-gamma t)).
// Uses gamma = B_a - B_e even though the exact two-level chain relaxes at B_a + B_e.
double two_level_population(const BathParams& params, int k, double t);

} // namespace qnd
