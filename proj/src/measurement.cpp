#include "qnd/measurement.hpp"

#include <limits>
#include <string>

namespace qnd {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

void check_match(const PopulationVector& pop, const ProjectorPartition& part) {
    if (pop.truncation() != part.truncation()) {
        throw DomainError("population truncation " + std::to_string(pop.truncation()) +
                          " does not match partition truncation " + std::to_string(part.truncation()));
    }
}

} // namespace

ProjectorPartition::ProjectorPartition(std::size_t truncation, std::vector<std::vector<std::size_t>> bins)
    : bins_(std::move(bins)), bin_of_(truncation + 1, kUnassigned) {
    if (truncation == 0) {
        throw DomainError("partition needs N >= 1");
    }
    if (bins_.empty()) {
        throw DomainError("partition needs at least one bin");
    }
    fine_ = bins_.size() == truncation + 1;
    for (std::size_t j = 0; j < bins_.size(); ++j) {
        if (bins_[j].empty()) {
            throw DomainError("partition bin " + std::to_string(j) + " is empty");
        }
        for (std::size_t level : bins_[j]) {
            if (level > truncation) {
                throw DomainError("partition level " + std::to_string(level) + " out of range");
            }
            if (bin_of_[level] != kUnassigned) {
                throw DomainError("partition bins overlap at level " + std::to_string(level));
            }
            bin_of_[level] = j;
        }
        fine_ = fine_ && bins_[j].size() == 1 && bins_[j][0] == j;
    }
    for (std::size_t level = 0; level <= truncation; ++level) {
        if (bin_of_[level] == kUnassigned) {
            throw DomainError("partition does not cover level " + std::to_string(level));
        }
    }
}

ProjectorPartition ProjectorPartition::fine(std::size_t truncation) {
    std::vector<std::vector<std::size_t>> bins(truncation + 1);
    for (std::size_t n = 0; n <= truncation; ++n) {
        bins[n] = {n};
    }
    return ProjectorPartition(truncation, std::move(bins));
}

std::vector<double> outcome_probabilities(const PopulationVector& pop, const ProjectorPartition& part) {
    check_match(pop, part);
    std::vector<double> p(part.bin_count(), 0.0);
    for (std::size_t j = 0; j < part.bin_count(); ++j) {
        for (std::size_t level : part.bin(j)) {
            p[j] += pop[level];
        }
    }
    return p;
}

PopulationVector luders_collapse(const PopulationVector& pop, const ProjectorPartition& part, std::size_t j) {
    check_match(pop, part);
    if (j >= part.bin_count()) {
        throw DomainError("outcome index " + std::to_string(j) + " out of range");
    }
    double inside = 0.0;
    bool leaks = false;
    for (std::size_t n = 0; n < pop.size(); ++n) {
        if (part.bin_of(n) == j) {
            inside += pop[n];
        } else if (pop[n] != 0.0) {
            leaks = true;
        }
    }
    if (!(inside > 0.0)) {
        throw ZeroProbabilityOutcome("Lüders update on outcome " + std::to_string(j) +
                                     " with zero probability");
    }
    if (!leaks) {
        return pop;
    }
    std::vector<double> w(pop.size(), 0.0);
    for (std::size_t level : part.bin(j)) {
        w[level] = pop[level] / inside;
    }
    return PopulationVector(std::move(w));
}

MeasurementOutcome sample_outcome(const PopulationVector& pop, const ProjectorPartition& part, RandomStream& rng) {
    const auto p = outcome_probabilities(pop, part);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last_possible = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        last_possible = j;
        cumulative += p[j];
        if (u < cumulative) {
            return {j};
        }
    }
    // Rounding left the cumulative sum just below u.
    return {last_possible};
}

} // namespace qnd
