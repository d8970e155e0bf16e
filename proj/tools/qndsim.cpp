// qndsim: quasicontinuous QND photon-number measurements of a thermal oscillator.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qnd/cli/commands.hpp"
#include "qnd/cli/config.hpp"

namespace {

struct Overrides {
    std::optional<double> gamma, n_thermal, boltzmann_ratio, gdt, horizon;
    std::optional<std::size_t> trunc, traj, level, threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> engine, mode, out;
    std::string config_file;
};

void add_flags(CLI::App& app, Overrides& o) {
    app.add_option("--config", o.config_file, "JSON configuration file; flags override its values");
    app.add_option("--gamma", o.gamma, "relaxation rate gamma (default 1)");
    app.add_option("--n-thermal", o.n_thermal, "thermal occupancy (default 0.1)");
    app.add_option("--boltzmann-ratio", o.boltzmann_ratio, "hbar*omega/theta; overrides --n-thermal");
    app.add_option("--trunc", o.trunc, "highest Fock level N (default 40)");
    app.add_option("--gdt", o.gdt, "gamma*dt between measurements (default 0.01)");
    app.add_option("--horizon", o.horizon, "gamma*t horizon (default 1)");
    app.add_option("--traj", o.traj, "trajectories; readings for dwell (default 100000)");
    app.add_option("--seed", o.seed, "master seed (default 0)");
    app.add_option("--engine", o.engine, "luders | gillespie")->check(CLI::IsMember({"luders", "gillespie"}));
    app.add_option("--mode", o.mode, "paper | exact: reference curve for Monte Carlo summaries")
        ->check(CLI::IsMember({"paper", "exact"}));
    app.add_option("--level", o.level, "initial / surviving level (default 0)");
    app.add_option("--threads", o.threads, "worker threads, 0 = all cores (results do not depend on it)");
    app.add_option("--out", o.out, "output file (default stdout)");
}

qnd::cli::RunConfig resolve(const Overrides& o) {
    using namespace qnd::cli;
    RunConfig config = o.config_file.empty() ? RunConfig{} : load_config_file(o.config_file);
    if (o.gamma) config.gamma = *o.gamma;
    if (o.n_thermal) {
        config.n_thermal = *o.n_thermal;
        config.boltzmann_ratio.reset();
    }
    if (o.boltzmann_ratio) config.boltzmann_ratio = *o.boltzmann_ratio;
    if (o.trunc) config.truncation = *o.trunc;
    if (o.gdt) config.gdt = *o.gdt;
    if (o.horizon) config.horizon = *o.horizon;
    if (o.traj) config.n_traj = *o.traj;
    if (o.seed) config.master_seed = *o.seed;
    if (o.engine) config.engine = qnd::parse_engine(*o.engine);
    if (o.mode) config.mode = parse_mode(*o.mode);
    if (o.level) config.level = *o.level;
    if (o.threads) config.threads = *o.threads;
    if (o.out) config.out = *o.out;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasicontinuous QND photon-number measurements of a thermal field oscillator"};
    app.require_subcommand(1);
    Overrides overrides;
    add_flags(app, overrides);
    for (const auto* name : {"thermal", "relax", "survival", "dwell", "zeno", "validate"}) {
        app.add_subcommand(name)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qnd::cli::kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    qnd::cli::RunConfig config;
    try {
        config = resolve(overrides);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qnd::cli::kExitUsage;
    }

    if (config.out.empty()) {
        return qnd::cli::run_command(command, config, std::cout, std::cerr);
    }
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot open '" << config.out << "' for writing\n";
        return qnd::cli::kExitUsage;
    }
    return qnd::cli::run_command(command, config, file, std::cerr);
}
