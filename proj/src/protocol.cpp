#include "qnd/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace qnd {

namespace {

SchedulePtr require_schedule(SchedulePtr schedule) {
    if (!schedule) {
        throw DomainError("measurement schedule is null");
    }
    return schedule;
}

std::optional<std::size_t> pure_support(const PopulationVector& pop) {
    for (std::size_t n = 0; n < pop.size(); ++n) {
        if (pop[n] == 1.0) return n;
    }
    return std::nullopt;
}

std::size_t draw_level(const PopulationVector& pop, RandomStream& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last = 0;
    for (std::size_t n = 0; n < pop.size(); ++n) {
        if (pop[n] <= 0.0) continue;
        last = n;
        cumulative += pop[n];
        if (u < cumulative) return n;
    }
    return last;
}

void check_two_level_index(int k) {
    if (k != 0 && k != 1) {
        throw DomainError("two-level survival index must be 0 or 1");
    }
}

} // namespace

MeasurementSchedule::MeasurementSchedule(double dt, std::size_t steps, ProjectorPartition partition)
    : dt_(dt), steps_(steps), partition_(std::move(partition)) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("schedule needs dt > 0");
    }
    if (steps == 0) {
        throw DomainError("schedule needs at least one measurement");
    }
}

std::string_view engine_name(Engine engine) noexcept {
    return engine == Engine::luders ? "luders" : "gillespie";
}

Engine parse_engine(std::string_view name) {
    if (name == "luders") return Engine::luders;
    if (name == "gillespie") return Engine::gillespie;
    throw DomainError("unknown engine '" + std::string(name) + "'");
}

LudersEngine::LudersEngine(const BathParams& params, SchedulePtr schedule)
    : schedule_(require_schedule(std::move(schedule))),
      step_(build_generator(params, schedule_->truncation()), schedule_->dt()) {}

MeasurementRecord LudersEngine::run(const PopulationVector& initial, SeedPair seed) const {
    const auto& part = schedule_->partition();
    if (initial.truncation() != part.truncation()) {
        throw DomainError("initial state truncation does not match the schedule");
    }
    auto rng = make_stream(seed.master, seed.index);
    MeasurementRecord record{schedule_, pure_support(initial), {}, seed};
    record.outcomes.reserve(schedule_->steps());

    PopulationVector state = initial;
    std::vector<double> evolved(state.size());
    for (std::size_t i = 0; i < schedule_->steps(); ++i) {
        step_.apply(state.weights(), evolved);
        PopulationVector before(evolved);
        const auto outcome = sample_outcome(before, part, rng);
        state = luders_collapse(before, part, outcome.bin_index);
        record.outcomes.push_back(static_cast<std::uint32_t>(outcome.bin_index));
    }
    return record;
}

GillespieEngine::GillespieEngine(const BathParams& params, SchedulePtr schedule)
    : schedule_(require_schedule(std::move(schedule))),
      generator_(params, schedule_->truncation()) {
    if (!schedule_->partition().is_fine()) {
        throw DomainError("the jump engine reads out the occupied level and needs a fine partition");
    }
}

MeasurementRecord GillespieEngine::run(const PopulationVector& initial, SeedPair seed) const {
    if (initial.truncation() != generator_.truncation()) {
        throw DomainError("initial state truncation does not match the schedule");
    }
    auto rng = make_stream(seed.master, seed.index);
    const auto pure = pure_support(initial);
    std::size_t level = pure ? *pure : draw_level(initial, rng);

    MeasurementRecord record{schedule_, level, {}, seed};
    record.outcomes.reserve(schedule_->steps());

    auto next_jump = [&](double now) {
        const double rate = generator_.exit_rate(level);
        return rate > 0.0 ? now + exponential_time(rng, rate) : INFINITY;
    };
    double jump_time = next_jump(0.0);
    for (std::size_t i = 1; i <= schedule_->steps(); ++i) {
        const double sample_time = schedule_->dt() * static_cast<double>(i);
        while (jump_time <= sample_time) {
            const double up = generator_.up_rate(level);
            const double total = generator_.exit_rate(level);
            if (uniform01(rng) * total < up) {
                ++level;
            } else {
                --level;
            }
            jump_time = next_jump(jump_time);
        }
        record.outcomes.push_back(static_cast<std::uint32_t>(level));
    }
    return record;
}

MeasurementRecord run_trajectory_luders(const BathParams& params, SchedulePtr schedule,
                                        const PopulationVector& initial, SeedPair seed) {
    return LudersEngine(params, std::move(schedule)).run(initial, seed);
}

MeasurementRecord run_trajectory_gillespie(const BathParams& params, SchedulePtr schedule,
                                           std::size_t initial_level, SeedPair seed) {
    const std::size_t truncation = require_schedule(schedule)->truncation();
    return GillespieEngine(params, std::move(schedule)).run(pure_level(initial_level, truncation), seed);
}

std::vector<MeasurementRecord> run_ensemble(const BathParams& params, SchedulePtr schedule,
                                            const PopulationVector& initial, std::size_t n_traj,
                                            std::uint64_t master_seed, Engine engine,
                                            std::size_t threads) {
    if (n_traj == 0) {
        throw DomainError("ensemble needs at least one trajectory");
    }
    std::optional<LudersEngine> luders;
    std::optional<GillespieEngine> jumps;
    if (engine == Engine::luders) {
        luders.emplace(params, schedule);
    } else {
        jumps.emplace(params, schedule);
    }
    std::vector<MeasurementRecord> records(n_traj);
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const SeedPair seed{master_seed, i};
            records[i] = luders ? luders->run(initial, seed) : jumps->run(initial, seed);
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, n_traj);
    if (threads == 1) {
        run_range(0, n_traj);
        return records;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            const std::size_t begin = n_traj * w / threads;
            const std::size_t end = n_traj * (w + 1) / threads;
            workers.emplace_back([&, w, begin, end] {
                try {
                    run_range(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return records;
}

double survival_product(const BathParams& params, int k, double dt, std::size_t m) {
    check_two_level_index(k);
    if (!(dt > 0.0) || m == 0) {
        throw DomainError("survival_product needs dt > 0 and m >= 1");
    }
    const double other = params.two_level_thermal_weight(1 - k);
    const double single = 1.0 - other * (1.0 - std::exp(-params.gamma() * dt));
    return std::pow(single, static_cast<double>(m));
}

double survival_exponential(const BathParams& params, int k, double t) {
    check_two_level_index(k);
    if (!(t >= 0.0)) {
        throw DomainError("survival_exponential needs t >= 0");
    }
    return std::exp(-params.two_level_thermal_weight(1 - k) * params.gamma() * t);
}

std::vector<double> exact_sampled_survival(const BathParams& params, std::size_t truncation,
                                           std::size_t level, double dt, std::size_t steps) {
    if (level > truncation) {
        throw DomainError("survival level exceeds truncation");
    }
    const TransitionMatrix step(build_generator(params, truncation), dt);
    const double stay = step.at(level, level);
    std::vector<double> survival(steps + 1);
    survival[0] = 1.0;
    for (std::size_t i = 1; i <= steps; ++i) {
        survival[i] = survival[i - 1] * stay;
    }
    return survival;
}

ZenoReport zeno_times(const BathParams& params) {
    const double gamma = params.gamma();
    const double nth = params.n_thermal();
    ZenoReport report;
    report.tau = 1.0 / gamma;
    report.tau_0 = 1.0 / (nth * gamma);
    report.tau_1 = 1.0 / ((1.0 - nth) * gamma);
    report.slowdown_0 = report.tau_0 / report.tau;
    report.slowdown_1 = report.tau_1 / report.tau;
    if (nth >= 1.0) {
        report.domain_warning = "n_thermal >= 1: tau_1 = 1/((1 - n_thermal) gamma) is not a positive "
                                "time and the partial Zeno ordering does not hold";
    }
    return report;
}

} // namespace qnd
