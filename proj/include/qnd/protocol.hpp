// protocol.hpp: quasicontinuous QND measurement protocol.
//
// Two Monte Carlo engines produce MeasurementRecords for the same process:
//   LudersEngine    propagate by dt (exact chain), sample an outcome, Lüders-collapse
//   GillespieEngine exact event-driven jumps of the birth-death chain, read at k*dt
// plus the closed-form survival and persistence-time formulas.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnd/dynamics.hpp"
#include "qnd/measurement.hpp"
#include "qnd/oscillator.hpp"
#include "qnd/random.hpp"

namespace qnd {

class MeasurementSchedule {
public:
    MeasurementSchedule(double dt, std::size_t steps, ProjectorPartition partition);

    double dt() const noexcept { return dt_; }
    std::size_t steps() const noexcept { return steps_; }
    double duration() const noexcept { return dt_ * static_cast<double>(steps_); }
    const ProjectorPartition& partition() const noexcept { return partition_; }
    std::size_t truncation() const noexcept { return partition_.truncation(); }

private:
    double dt_;
    std::size_t steps_;
    ProjectorPartition partition_;
};

using SchedulePtr = std::shared_ptr<const MeasurementSchedule>;

struct SeedPair {
    std::uint64_t master{0};
    std::uint64_t index{0};
};

// outcomes[i] is the bin observed at time (i + 1) * dt.
struct MeasurementRecord {
    SchedulePtr schedule;
    std::optional<std::size_t> initial_level; // empty for a mixed initial state (Lüders engine)
    std::vector<std::uint32_t> outcomes;
    SeedPair seed;

    friend bool operator==(const MeasurementRecord& a, const MeasurementRecord& b) {
        return a.initial_level == b.initial_level && a.outcomes == b.outcomes &&
               a.seed.master == b.seed.master && a.seed.index == b.seed.index;
    }
};

enum class Engine { luders, gillespie };

std::string_view engine_name(Engine engine) noexcept;
Engine parse_engine(std::string_view name);

class LudersEngine {
public:
    LudersEngine(const BathParams& params, SchedulePtr schedule);
    MeasurementRecord run(const PopulationVector& initial, SeedPair seed) const;

private:
    SchedulePtr schedule_;
    TransitionMatrix step_;
};

class GillespieEngine {
public:
    // Requires a fine partition.
    GillespieEngine(const BathParams& params, SchedulePtr schedule);
    // A non-pure initial state is resolved by drawing the starting level from
    // the trajectory's own stream.
    MeasurementRecord run(const PopulationVector& initial, SeedPair seed) const;

private:
    SchedulePtr schedule_;
    BirthDeathGenerator generator_;
};

MeasurementRecord run_trajectory_luders(const BathParams& params, SchedulePtr schedule,
                                        const PopulationVector& initial, SeedPair seed);
MeasurementRecord run_trajectory_gillespie(const BathParams& params, SchedulePtr schedule,
                                           std::size_t initial_level, SeedPair seed);

// Trajectory i uses the stream derived from (master_seed, i). Results do not
// depend on `threads` (0 selects the hardware concurrency).
std::vector<MeasurementRecord> run_ensemble(const BathParams& params, SchedulePtr schedule,
                                            const PopulationVector& initial, std::size_t n_traj,
                                            std::uint64_t master_seed, Engine engine,
                                            std::size_t threads = 1);

// [1 - <w_kbar>_thermal (1 - exp(-gamma dt))]^m, two-level thermal weights.
double survival_product(const BathParams& params, int k, double dt, std::size_t m);

// exp(-t / tau_k), tau_k = 1 / (<w_kbar>_thermal gamma).
double survival_exponential(const BathParams& params, int k, double t);

// Probability that the exact chain, started in pure `level` and read out by a
// fine partition every dt, reports `level` at each of the first i readings;
// element i of the result for i = 0..steps. Leave-and-return excursions inside
// one interval count as survival, exactly as the engines see them.
std::vector<double> exact_sampled_survival(const BathParams& params, std::size_t truncation,
                                           std::size_t level, double dt, std::size_t steps);

struct ZenoReport {
    double tau{0};        // free relaxation time 1/gamma
    double tau_0{0};      // 1/(n_thermal gamma)
    double tau_1{0};      // 1/((1 - n_thermal) gamma)
    double slowdown_0{0}; // tau_0 / tau
    double slowdown_1{0}; // tau_1 / tau
    // Set when n_thermal >= 1: tau_1 is then infinite or negative and the
    // slowdown ordering no longer holds.
    std::optional<std::string> domain_warning;
};

ZenoReport zeno_times(const BathParams& params);

} // namespace qnd
