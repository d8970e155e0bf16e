// config.hpp: run configuration shared by every subcommand.
//
// Physical inputs are given in units of gamma: gdt = gamma*dt, horizon = gamma*t.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnd/oscillator.hpp"
#include "qnd/protocol.hpp"

namespace qnd::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { paper, exact };

struct RunConfig {
    double gamma{1.0};
    double n_thermal{0.1};
    // Overrides n_thermal when set: n_thermal = 1 / (exp(ratio) - 1).
    std::optional<double> boltzmann_ratio;
    std::size_t truncation{40};
    double gdt{0.01};
    double horizon{1.0};
    std::size_t n_traj{100000};
    std::uint64_t master_seed{0};
    Engine engine{Engine::luders};
    Mode mode{Mode::exact};
    std::size_t level{0};
    std::size_t threads{0}; // 0: hardware concurrency; never affects results
    std::string out;
};

std::string_view mode_name(Mode mode) noexcept;
Mode parse_mode(std::string_view name);

// Keys mirror the long flag names with dashes as underscores:
// gamma, n_thermal, boltzmann_ratio, trunc, gdt, horizon, traj, seed, engine,
// mode, level, threads, out. Unknown keys are rejected.
void apply_json(RunConfig& config, const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

// Throws ConfigError on any violated invariant.
void validate_config(const RunConfig& config);
std::vector<std::string> config_warnings(const RunConfig& config);

double effective_n_thermal(const RunConfig& config);
BathParams bath_params(const RunConfig& config);
// Number of readings spanning the horizon.
std::size_t step_count(const RunConfig& config);
double dt(const RunConfig& config);

} // namespace qnd::cli
