// measurement.hpp: QND projective measurements on Fock-diagonal states.
//
// A measurement is a partition of the levels 0..N into bins; each bin is the
// support of one projector. Outcome probabilities are bin sums of the
// populations and the Lüders update keeps the bin and renormalizes it.

#pragma once

#include <cstddef>
#include <vector>

#include "qnd/oscillator.hpp"
#include "qnd/random.hpp"

namespace qnd {

// Conditioning on an outcome that has zero probability.
class ZeroProbabilityOutcome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProjectorPartition {
public:
    // Bins must be nonempty, pairwise disjoint and cover 0..truncation exactly.
    ProjectorPartition(std::size_t truncation, std::vector<std::vector<std::size_t>> bins);

    // {{0}, {1}, ..., {N}}: photon-number resolving read-out.
    static ProjectorPartition fine(std::size_t truncation);

    std::size_t truncation() const noexcept { return bin_of_.size() - 1; }
    std::size_t bin_count() const noexcept { return bins_.size(); }
    const std::vector<std::size_t>& bin(std::size_t j) const { return bins_.at(j); }
    std::size_t bin_of(std::size_t level) const { return bin_of_.at(level); }
    // True when bin j is exactly {j} for every j.
    bool is_fine() const noexcept { return fine_; }

private:
    std::vector<std::vector<std::size_t>> bins_;
    std::vector<std::size_t> bin_of_;
    bool fine_{false};
};

struct MeasurementOutcome {
    std::size_t bin_index{0};
    friend bool operator==(const MeasurementOutcome&, const MeasurementOutcome&) = default;
};

std::vector<double> outcome_probabilities(const PopulationVector& pop, const ProjectorPartition& part);

// Lüders update for outcome j. A state already supported inside bin j is
// returned unchanged, bit for bit.
PopulationVector luders_collapse(const PopulationVector& pop, const ProjectorPartition& part, std::size_t j);

MeasurementOutcome sample_outcome(const PopulationVector& pop, const ProjectorPartition& part, RandomStream& rng);

} // namespace qnd
