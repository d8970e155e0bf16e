#include "qnd/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

namespace {

std::vector<double> binomial_errors(const std::vector<double>& p, std::int64_t total) {
    std::vector<double> se(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        se[i] = std::sqrt(std::max(0.0, p[i] * (1.0 - p[i])) / static_cast<double>(total));
    }
    return se;
}

const MeasurementSchedule& schedule_of(const MeasurementRecord& record) {
    if (!record.schedule) {
        throw DomainError("measurement record has no schedule");
    }
    return *record.schedule;
}

} // namespace

SurvivalCurve SurvivalCurve::from_probabilities(std::vector<double> times, std::vector<double> probabilities,
                                                std::int64_t total) {
    if (times.size() != probabilities.size() || times.empty() || total <= 0) {
        throw DomainError("from_probabilities: mismatched or empty input");
    }
    SurvivalCurve curve;
    curve.total = total;
    curve.survivors.resize(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        curve.survivors[i] = std::llround(probabilities[i] * static_cast<double>(total));
    }
    curve.standard_error = binomial_errors(probabilities, total);
    curve.times = std::move(times);
    curve.survival = std::move(probabilities);
    return curve;
}

SurvivalCurve estimate_survival(std::span<const MeasurementRecord> records, std::size_t bin) {
    if (records.empty()) {
        throw DomainError("estimate_survival: empty ensemble");
    }
    const auto& schedule = schedule_of(records.front());
    const std::size_t steps = schedule.steps();

    // breaks[i]: records whose first reading different from `bin` is reading i (1-based).
    std::vector<std::int64_t> breaks(steps + 2, 0);
    for (const auto& record : records) {
        const auto& s = schedule_of(record);
        if (s.steps() != steps || s.dt() != schedule.dt() || record.outcomes.size() != steps) {
            throw DomainError("estimate_survival: records do not share one schedule");
        }
        std::size_t first_break = steps + 1;
        for (std::size_t i = 0; i < steps; ++i) {
            if (record.outcomes[i] != bin) {
                first_break = i + 1;
                break;
            }
        }
        ++breaks[first_break];
    }

    SurvivalCurve curve;
    curve.total = static_cast<std::int64_t>(records.size());
    curve.times.resize(steps + 1);
    curve.survivors.resize(steps + 1);
    curve.survival.resize(steps + 1);
    std::int64_t alive = curve.total;
    for (std::size_t i = 0; i <= steps; ++i) {
        alive -= breaks[i];
        curve.times[i] = schedule.dt() * static_cast<double>(i);
        curve.survivors[i] = alive;
        curve.survival[i] = static_cast<double>(alive) / static_cast<double>(curve.total);
    }
    curve.standard_error = binomial_errors(curve.survival, curve.total);
    return curve;
}

FitResult fit_decay(const SurvivalCurve& curve, double floor) {
    const std::size_t n = curve.survival.size();
    if (curve.times.size() != n || curve.survivors.size() != n || curve.total <= 0) {
        throw DomainError("fit_decay: malformed survival curve");
    }
    const double min_gap = 1.0 / static_cast<double>(curve.total);
    double sw = 0, st = 0, sy = 0;
    std::vector<std::size_t> used;
    std::vector<double> weights;
    bool decayed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = curve.survival[i];
        if (!(p >= floor) || !(p > 0.0) || curve.survivors[i] < kMinFitSurvivors) continue;
        const double w = static_cast<double>(curve.survivors[i]) / std::max(1.0 - p, min_gap);
        used.push_back(i);
        weights.push_back(w);
        sw += w;
        st += w * curve.times[i];
        sy += w * std::log(p);
        decayed = decayed || p < 1.0;
    }
    if (used.size() < 3) {
        throw FitFailure("fit_decay: " + std::to_string(used.size()) +
                         " points above the survival floor, need at least 3");
    }
    if (!decayed) {
        throw FitFailure("fit_decay: the survival curve never drops below 1");
    }
    const double t_mean = st / sw;
    const double y_mean = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < used.size(); ++k) {
        const std::size_t i = used[k];
        const double dt = curve.times[i] - t_mean;
        sxx += weights[k] * dt * dt;
        sxy += weights[k] * dt * (std::log(curve.survival[i]) - y_mean);
    }
    if (!(sxx > 0.0)) {
        throw FitFailure("fit_decay: qualifying points share a single time");
    }
    FitResult fit;
    fit.rate = -sxy / sxx;
    fit.standard_error = std::sqrt(1.0 / sxx);
    fit.floor = floor;
    fit.first_point = used.front();
    fit.last_point = used.back();
    fit.points_used = used.size();
    return fit;
}

std::vector<double> DwellStats::dwell_lengths(std::size_t bin, bool include_censored) const {
    std::vector<double> lengths;
    for (const auto& run : runs.at(bin)) {
        if (include_censored || !run.censored) {
            lengths.push_back(static_cast<double>(run.length));
        }
    }
    return lengths;
}

DwellStats dwell_statistics(const MeasurementRecord& record) {
    const auto& schedule = schedule_of(record);
    const std::size_t bins = schedule.partition().bin_count();
    DwellStats stats;
    stats.dt = schedule.dt();
    stats.steps = record.outcomes.size();
    stats.steps_per_bin.assign(bins, 0);
    stats.runs.assign(bins, {});

    const auto& out = record.outcomes;
    std::size_t start = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] >= bins) {
            throw DomainError("record outcome " + std::to_string(out[i]) + " is not a valid bin");
        }
        ++stats.steps_per_bin[out[i]];
        const bool run_ends = i + 1 == out.size() || out[i + 1] != out[i];
        if (run_ends) {
            const bool censored = start == 0 || i + 1 == out.size();
            stats.runs[out[i]].push_back({i + 1 - start, censored});
            start = i + 1;
        }
    }
    stats.fractions.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        stats.fractions[j] = static_cast<double>(stats.steps_per_bin[j]) / static_cast<double>(stats.steps);
    }
    return stats;
}

double time_average(const MeasurementRecord& record, std::size_t bin) {
    if (record.outcomes.empty()) {
        throw DomainError("time_average: empty record");
    }
    const auto count = std::count(record.outcomes.begin(), record.outcomes.end(), bin);
    return static_cast<double>(static_cast<std::size_t>(count)) / static_cast<double>(record.outcomes.size());
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Small-lambda form converges quickly where the alternating series does not.
        const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
        double series = 0.0;
        for (int j = 1; j <= 6; ++j) {
            series += std::pow(y, (2 * j - 1) * (2 * j - 1));
        }
        const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * series;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw DomainError("ks_distance: empty sample");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    const double ne = std::sqrt(nx * ny / (nx + ny));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

} // namespace qnd
