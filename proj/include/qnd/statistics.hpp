// statistics.hpp: survival curves, decay fits, dwell times and time averages
// built from measurement records.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qnd/protocol.hpp"

namespace qnd {

class FitFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Point i is the sampling time i*dt, i = 0..m; point 0 is the baseline where
// every record still survives.
struct SurvivalCurve {
    std::vector<double> times;
    std::vector<std::int64_t> survivors;
    std::int64_t total{0};
    std::vector<double> survival;
    std::vector<double> standard_error; // sqrt(p (1 - p) / total)

    // Wraps exact probabilities as a curve over `total` notional records.
    static SurvivalCurve from_probabilities(std::vector<double> times, std::vector<double> probabilities,
                                            std::int64_t total);
};

// survivors[i] counts records whose first i outcomes all equal `bin`. The
// records should start in a state supported inside `bin` for the curve to be a
// survival probability; that is the caller's business.
SurvivalCurve estimate_survival(std::span<const MeasurementRecord> records, std::size_t bin);

struct FitResult {
    double rate{0};
    double standard_error{0};
    double floor{0};
    std::size_t first_point{0};
    std::size_t last_point{0};
    std::size_t points_used{0};
};

inline constexpr double kDefaultSurvivalFloor = 0.05;
inline constexpr std::int64_t kMinFitSurvivors = 10;

// Weighted least squares of ln(survival) against time over the points with
// survival >= floor and at least kMinFitSurvivors survivors. Weights are the
// inverse delta-method variances survivors / (1 - p), with 1 - p floored at
// 1 / total. Throws FitFailure with fewer than three such points or when none
// of them has decayed below 1.
FitResult fit_decay(const SurvivalCurve& curve, double floor = kDefaultSurvivalFloor);

struct DwellRun {
    std::size_t length{0}; // in units of dt
    // First and last runs of a record are cut by its ends.
    bool censored{false};
    friend bool operator==(const DwellRun&, const DwellRun&) = default;
};

struct DwellStats {
    double dt{0};
    std::size_t steps{0};
    std::vector<std::size_t> steps_per_bin;
    std::vector<double> fractions;
    std::vector<std::vector<DwellRun>> runs; // per bin, in record order

    double total_time() const noexcept { return dt * static_cast<double>(steps); }
    double time_in_bin(std::size_t bin) const { return dt * static_cast<double>(steps_per_bin.at(bin)); }
    // Run lengths in units of dt; censored runs only when asked for.
    std::vector<double> dwell_lengths(std::size_t bin, bool include_censored = false) const;
};

DwellStats dwell_statistics(const MeasurementRecord& record);

// Fraction of readings equal to `bin`: the record's time average of w_bin.
double time_average(const MeasurementRecord& record, std::size_t bin);

struct KsResult {
    double statistic{0};
    double p_value{1};
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_distance(std::span<const double> a, std::span<const double> b);

// Asymptotic Kolmogorov survival function Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

} // namespace qnd
