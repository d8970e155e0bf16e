#include "qnd/cli/config.hpp"

#include <cmath>
#include <fstream>

namespace qnd::cli {

std::string_view mode_name(Mode mode) noexcept {
    return mode == Mode::paper ? "paper" : "exact";
}

Mode parse_mode(std::string_view name) {
    if (name == "paper") return Mode::paper;
    if (name == "exact") return Mode::exact;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected paper or exact)");
}

void apply_json(RunConfig& config, const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "gamma") config.gamma = value.get<double>();
            else if (key == "n_thermal") config.n_thermal = value.get<double>();
            else if (key == "boltzmann_ratio") config.boltzmann_ratio = value.get<double>();
            else if (key == "trunc") config.truncation = value.get<std::size_t>();
            else if (key == "gdt") config.gdt = value.get<double>();
            else if (key == "horizon") config.horizon = value.get<double>();
            else if (key == "traj") config.n_traj = value.get<std::size_t>();
            else if (key == "seed") config.master_seed = value.get<std::uint64_t>();
            else if (key == "engine") config.engine = parse_engine(value.get<std::string>());
            else if (key == "mode") config.mode = parse_mode(value.get<std::string>());
            else if (key == "level") config.level = value.get<std::size_t>();
            else if (key == "threads") config.threads = value.get<std::size_t>();
            else if (key == "out") config.out = value.get<std::string>();
            else throw ConfigError("unknown configuration key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("configuration value has the wrong type: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    RunConfig config;
    apply_json(config, doc);
    return config;
}

double effective_n_thermal(const RunConfig& config) {
    return config.boltzmann_ratio ? 1.0 / std::expm1(*config.boltzmann_ratio) : config.n_thermal;
}

void validate_config(const RunConfig& config) {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(config.gamma)) throw ConfigError("gamma must be positive");
    if (config.boltzmann_ratio && !positive(*config.boltzmann_ratio)) {
        throw ConfigError("boltzmann ratio must be positive");
    }
    if (!positive(effective_n_thermal(config))) throw ConfigError("n_thermal must be positive");
    if (config.truncation < 1) throw ConfigError("truncation must be at least 1");
    if (!positive(config.gdt)) throw ConfigError("gamma*dt must be positive");
    if (!positive(config.horizon)) throw ConfigError("horizon gamma*t must be positive");
    if (config.gdt > config.horizon) throw ConfigError("gamma*dt exceeds the horizon gamma*t");
    if (config.n_traj < 1) throw ConfigError("trajectory count must be at least 1");
    if (config.level > config.truncation) throw ConfigError("level exceeds the truncation");
}

std::vector<std::string> config_warnings(const RunConfig& config) {
    std::vector<std::string> warnings;
    const double n = effective_n_thermal(config);
    if (n >= 1.0) {
        warnings.push_back("n_thermal >= 1: the partial Zeno ordering tau_k > tau degenerates "
                           "(tau_1 = 1/((1 - n_thermal) gamma) is not a positive time)");
    } else if (n >= 0.5) {
        warnings.push_back("n_thermal = " + std::to_string(n) +
                           " is outside the small-occupancy regime of the two-level formulas; "
                           "Zeno ordering is weak (slowdown_0 = " + std::to_string(1.0 / n) + ")");
    }
    return warnings;
}

BathParams bath_params(const RunConfig& config) {
    try {
        return bath_from_gamma(config.gamma, effective_n_thermal(config));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

std::size_t step_count(const RunConfig& config) {
    return static_cast<std::size_t>(std::llround(config.horizon / config.gdt));
}

double dt(const RunConfig& config) {
    return config.gdt / config.gamma;
}

} // namespace qnd::cli
