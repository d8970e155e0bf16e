#include "qnd/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "qnd/acceptance.hpp"
#include "qnd/cli/csv.hpp"
#include "qnd/dynamics.hpp"
#include "qnd/protocol.hpp"
#include "qnd/statistics.hpp"

namespace qnd::cli {

namespace {

void emit_warnings(const RunConfig& config, std::ostream& log) {
    for (const auto& w : config_warnings(config)) {
        log << "warning: " << w << '\n';
    }
}

int two_level_index(const RunConfig& config) {
    if (config.level > 1) {
        throw ConfigError("the closed-form survival formulas cover levels 0 and 1 only");
    }
    return static_cast<int>(config.level);
}

SchedulePtr fine_schedule(const RunConfig& config, std::size_t truncation, std::size_t steps) {
    return std::make_shared<const MeasurementSchedule>(dt(config), steps, ProjectorPartition::fine(truncation));
}

std::vector<MeasurementRecord> survival_ensemble(const RunConfig& config, const BathParams& params,
                                                 std::size_t level, std::uint64_t seed_offset) {
    const auto sched = fine_schedule(config, config.truncation, step_count(config));
    return run_ensemble(params, sched, pure_level(level, config.truncation), config.n_traj,
                        config.master_seed + seed_offset, config.engine, config.threads);
}

} // namespace

int cmd_thermal(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    const auto params = bath_params(config);
    const auto pop = thermal_populations(params, config.truncation);

    CsvWriter csv(out);
    write_metadata(csv, config, "thermal");
    csv.header({"quantity", "value"});
    csv.row("n_thermal", params.n_thermal());
    csv.row("boltzmann_ratio", params.boltzmann_ratio());
    csv.row("emission_rate", params.emission_rate());
    csv.row("absorption_rate", params.absorption_rate());
    csv.row("gamma", params.gamma());
    csv.row("mean_photon_truncated", mean_photon(pop));
    csv.row("tail_mass_bound", thermal_tail_mass(params, config.truncation));
    csv.blank_line();
    csv.header({"level", "weight"});
    for (std::size_t n = 0; n < pop.size(); ++n) {
        csv.row(n, pop[n]);
    }
    return kExitOk;
}

int cmd_relax(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    const auto params = bath_params(config);
    const auto gen = build_generator(params, config.truncation);
    const auto start = pure_level(config.level, config.truncation);
    const double initial_mean = mean_photon(start);

    CsvWriter csv(out);
    write_metadata(csv, config, "relax", {{"initial_state", "pure level " + format_number(config.level)}});
    csv.header({"gamma_t", "nbar_analytic", "nbar_numeric", "abs_error"});
    const std::size_t steps = step_count(config);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double gt = config.gdt * static_cast<double>(i);
        const double t = gt / config.gamma;
        const double analytic = mean_relaxation(params, initial_mean, t);
        const double numeric = mean_photon(propagate(gen, start, t));
        csv.row(gt, analytic, numeric, std::abs(analytic - numeric));
    }
    return kExitOk;
}

int cmd_survival(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    const int k = two_level_index(config);
    const auto params = bath_params(config);
    const std::size_t steps = step_count(config);
    const double step = dt(config);

    const auto records = survival_ensemble(config, params, config.level, 0);
    const auto curve = estimate_survival(records, config.level);
    const auto exact = exact_sampled_survival(params, config.truncation, config.level, step, steps);

    CsvWriter csv(out);
    write_metadata(csv, config, "survival",
                   {{"uncertainty", "binomial standard error sqrt(p(1-p)/trajectories)"},
                    {"p_exact_chain", "exact chain probability of reading the start level at every sampling time"}});
    csv.header({"gamma_t", "p_product_eq26", "p_exponential_eq29", "p_exact_chain", "p_mc", "mc_stderr"});
    std::size_t agree = 0;
    double worst_z = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double gt = config.gdt * static_cast<double>(i);
        const double product = survival_product(params, k, step, i);
        const double reference = config.mode == Mode::exact ? exact[i] : product;
        const double se = std::max(curve.standard_error[i], 1.0 / static_cast<double>(curve.total));
        const double z = std::abs(curve.survival[i] - reference) / se;
        worst_z = std::max(worst_z, z);
        agree += z <= 3.0 ? 1 : 0;
        csv.row(gt, product, survival_exponential(params, k, gt / config.gamma), exact[i], curve.survival[i],
                curve.standard_error[i]);
    }
    csv.comment("mc_reference", config.mode == Mode::exact ? "p_exact_chain" : "p_product_eq26");
    csv.comment("rows_within_3_sigma", format_number(agree) + "/" + format_number(steps));
    csv.comment("max_abs_z", format_number(worst_z));
    return kExitOk;
}

int cmd_dwell(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    if (config.level > 1) {
        throw ConfigError("the dwell record runs on levels 0 and 1; --level must be 0 or 1");
    }
    const auto params = bath_params(config);
    // Two-level record: the dwell ratios concern the levels {0, 1} only.
    constexpr std::size_t kTruncation = 1;
    const std::size_t steps = config.n_traj;
    const auto sched = fine_schedule(config, kTruncation, steps);
    const auto initial = pure_level(config.level, kTruncation);
    const SeedPair seed{config.master_seed, 0};
    const auto record = config.engine == Engine::luders
                            ? run_trajectory_luders(params, sched, initial, seed)
                            : run_trajectory_gillespie(params, sched, config.level, seed);
    const auto stats = dwell_statistics(record);

    CsvWriter csv(out);
    write_metadata(csv, config, "dwell",
                   {{"record", "single two-level record (truncation 1), readings = trajectories"},
                    {"censoring", "first and last runs of the record are censored"}});
    csv.header({"bin", "readings", "gamma_time", "fraction"});
    for (std::size_t j = 0; j < stats.steps_per_bin.size(); ++j) {
        csv.row(j, stats.steps_per_bin[j], config.gdt * static_cast<double>(stats.steps_per_bin[j]),
                stats.fractions[j]);
    }
    csv.blank_line();
    csv.header({"bin", "dwell_readings", "uncensored_runs", "censored_runs"});
    for (std::size_t j = 0; j < stats.runs.size(); ++j) {
        std::map<std::size_t, std::pair<std::size_t, std::size_t>> histogram;
        for (const auto& run : stats.runs[j]) {
            auto& counts = histogram[run.length];
            (run.censored ? counts.second : counts.first) += 1;
        }
        for (const auto& [length, counts] : histogram) {
            csv.row(j, length, counts.first, counts.second);
        }
    }
    csv.blank_line();
    const double exact_pi1 = params.emission_rate() / (params.emission_rate() + params.absorption_rate());
    csv.header({"fraction_1", "closed_form_target_nthermal", "exact_target_pi1"});
    csv.row(stats.fractions[1], params.n_thermal(), exact_pi1);

    log << "dwell: fraction_1 = " << format_number(stats.fractions[1])
        << ", exact stationary " << format_number(exact_pi1)
        << ", two-level closed form " << format_number(params.n_thermal())
        << " (gap " << format_number(params.n_thermal() - exact_pi1) << ")\n";
    return kExitOk;
}

int cmd_zeno(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    const auto params = bath_params(config);
    const auto report = zeno_times(params);
    if (report.domain_warning) {
        log << "warning: " << *report.domain_warning << '\n';
    }
    const double gamma = params.gamma();

    CsvWriter csv(out);
    write_metadata(csv, config, "zeno",
                   {{"fit", "weighted least squares of ln(survival), floor 0.05, >= 10 survivors"},
                    {"fit_stderr", "weighted-regression covariance"}});
    csv.header({"quantity", "value"});
    csv.row("gamma_tau", report.tau * gamma);
    csv.row("gamma_tau_0", report.tau_0 * gamma);
    csv.row("gamma_tau_1", report.tau_1 * gamma);
    csv.row("slowdown_0", report.slowdown_0);
    csv.row("slowdown_1", report.slowdown_1);
    csv.blank_line();

    csv.header({"x", "p_product", "p_exponential", "abs_gap"});
    for (double x : {0.1, 0.01, 0.001}) {
        const auto m = static_cast<std::size_t>(std::llround(config.horizon / x));
        const double product = survival_product(params, 0, x / gamma, m);
        const double exponential = survival_exponential(params, 0, config.horizon / gamma);
        csv.row(x, product, exponential, std::abs(product - exponential));
    }
    csv.blank_line();

    const auto gen = build_generator(params, config.truncation);
    const std::size_t steps = step_count(config);
    csv.header({"level", "source", "fitted_rate", "rate_stderr", "fitted_gamma_tau", "closed_form_rate",
                "exact_chain_rate", "gap_to_closed_form"});
    for (int k : {0, 1}) {
        const double closed_rate = params.two_level_thermal_weight(1 - k);
        const double exact_rate = gen.exit_rate(static_cast<std::size_t>(k)) / gamma;

        const auto records = survival_ensemble(config, params, static_cast<std::size_t>(k),
                                               static_cast<std::uint64_t>(k) * 0x10000000ULL);
        const auto mc = fit_decay(estimate_survival(records, static_cast<std::size_t>(k)));

        std::vector<double> times(steps + 1), closed(steps + 1, 1.0);
        for (std::size_t i = 0; i <= steps; ++i) {
            times[i] = dt(config) * static_cast<double>(i);
            if (i > 0) closed[i] = survival_product(params, k, dt(config), i);
        }
        const auto analytic = fit_decay(SurvivalCurve::from_probabilities(times, closed, 1LL << 40));

        for (const auto& [source, fit] : {std::pair{"monte_carlo", mc}, std::pair{"closed_form", analytic}}) {
            const double rate = fit.rate / gamma;
            csv.row(k, source, rate, fit.standard_error / gamma, 1.0 / rate, closed_rate, exact_rate,
                    rate - closed_rate);
        }
    }
    return kExitOk;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& log) {
    validate_config(config);
    emit_warnings(config, log);
    std::vector<acceptance::CriterionResult> failures;
    for (const auto& criterion : acceptance::all_criteria()) {
        const auto result = criterion.run(config);
        out << acceptance::format_line(result) << '\n';
        out.flush();
        log << result.id << ": " << format_number(result.elapsed_seconds) << " s\n";
        if (!result.passed) failures.push_back(result);
    }
    if (failures.empty()) {
        out << "all criteria passed\n";
        return kExitOk;
    }
    out << failures.size() << " criteria failed:";
    for (const auto& f : failures) out << ' ' << f.id;
    out << '\n';
    return kExitFailure;
}

int run_command(std::string_view name, const RunConfig& config, std::ostream& out, std::ostream& log) {
    try {
        if (name == "thermal") return cmd_thermal(config, out, log);
        if (name == "relax") return cmd_relax(config, out, log);
        if (name == "survival") return cmd_survival(config, out, log);
        if (name == "dwell") return cmd_dwell(config, out, log);
        if (name == "zeno") return cmd_zeno(config, out, log);
        if (name == "validate") return cmd_validate(config, out, log);
        log << "error: unknown command '" << name << "'\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace qnd::cli
