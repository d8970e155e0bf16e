#include "qnd/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace qnd {

namespace {

// Largest Poisson mean handled in one uniformization pass; keeps exp(-mean) far
// from underflow.
constexpr double kMaxChunkMean = 40.0;

void uniformized_step(const BirthDeathGenerator& gen, double rate_bound, double mean,
                      double tolerance, std::vector<double>& v) {
    const std::size_t size = v.size();
    std::vector<double> term = v;
    std::vector<double> next(size);
    double weight = std::exp(-mean);
    for (std::size_t n = 0; n < size; ++n) {
        v[n] = weight * term[n];
    }
    for (std::size_t k = 1;; ++k) {
        // term <- (I + Q / rate_bound) term
        for (std::size_t n = 0; n < size; ++n) {
            double acc = (1.0 - gen.exit_rate(n) / rate_bound) * term[n];
            if (n >= 1) acc += gen.up_rate(n - 1) / rate_bound * term[n - 1];
            if (n + 1 < size) acc += gen.down_rate(n + 1) / rate_bound * term[n + 1];
            next[n] = acc;
        }
        term.swap(next);
        weight *= mean / static_cast<double>(k);
        for (std::size_t n = 0; n < size; ++n) {
            v[n] += weight * term[n];
        }
        // Poisson tail beyond k is bounded by a geometric series once k + 1 > mean.
        const double ratio = mean / static_cast<double>(k + 1);
        if (ratio < 1.0 && weight * ratio / (1.0 - ratio) <= tolerance) {
            break;
        }
    }
}

std::vector<double> propagate_raw(const BirthDeathGenerator& gen, std::vector<double> v, double duration) {
    const double rate_bound = gen.max_exit_rate();
    if (duration == 0.0 || rate_bound == 0.0) {
        return v;
    }
    const double total_mean = rate_bound * duration;
    const auto chunks = static_cast<std::size_t>(std::max(1.0, std::ceil(total_mean / kMaxChunkMean)));
    const double mean = total_mean / static_cast<double>(chunks);
    const double tolerance = kUniformizationTolerance / static_cast<double>(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        uniformized_step(gen, rate_bound, mean, tolerance, v);
    }
    return v;
}

void check_duration(double duration) {
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw DomainError("propagation duration must be finite and non-negative");
    }
}

} // namespace

PopulationVector propagate(const BirthDeathGenerator& gen, const PopulationVector& pop, double duration) {
    check_duration(duration);
    if (pop.truncation() != gen.truncation()) {
        throw DomainError("propagate: population and generator truncations differ");
    }
    const auto w = pop.weights();
    return PopulationVector(propagate_raw(gen, std::vector<double>(w.begin(), w.end()), duration));
}

TransitionMatrix::TransitionMatrix(const BirthDeathGenerator& gen, double duration)
    : size_(gen.truncation() + 1), duration_(duration), data_(size_ * size_, 0.0) {
    check_duration(duration);
    for (std::size_t from = 0; from < size_; ++from) {
        std::vector<double> unit(size_, 0.0);
        unit[from] = 1.0;
        const auto col = propagate_raw(gen, std::move(unit), duration);
        std::copy(col.begin(), col.end(), data_.begin() + static_cast<std::ptrdiff_t>(from * size_));
    }
}

void TransitionMatrix::apply(std::span<const double> w, std::span<double> out) const {
    if (w.size() != size_ || out.size() != size_) {
        throw DomainError("TransitionMatrix::apply: size mismatch");
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t from = 0; from < size_; ++from) {
        const double x = w[from];
        if (x == 0.0) continue;
        const double* col = data_.data() + from * size_;
        for (std::size_t to = 0; to < size_; ++to) {
            out[to] += col[to] * x;
        }
    }
}

double mean_relaxation(const BathParams& params, double initial_mean, double t) {
    if (!(initial_mean >= 0.0) || !(t >= 0.0)) {
        throw DomainError("mean_relaxation requires n(0) >= 0 and t >= 0");
    }
    const double nth = params.n_thermal();
    return nth + (initial_mean - nth) * std::exp(-params.gamma() * t);
}

double two_level_population(const BathParams& params, int k, double t) {
    if (k != 0 && k != 1) {
        throw DomainError("two_level_population: k must be 0 or 1");
    }
    if (!(t >= 0.0)) {
        throw DomainError("two_level_population: t must be non-negative");
    }
    const double other = params.two_level_thermal_weight(1 - k);
    return 1.0 - other * (1.0 - std::exp(-params.gamma() * t));
}

} // namespace qnd
