#include "qnd/cli/csv.hpp"

#include <array>
#include <charconv>

#ifndef QND_VERSION
#define QND_VERSION "dev"
#endif

namespace qnd::cli {

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

void CsvWriter::comment(std::string_view key, std::string_view value) {
    out_ << "# " << key << ": " << value << '\n';
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
        if (!first) out_ << ',';
        out_ << c;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::blank_line() {
    out_ << '\n';
}

void write_metadata(CsvWriter& csv, const RunConfig& config, std::string_view command,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    csv.comment("artifact", "qndsim " QND_VERSION);
    csv.comment("command", command);
    csv.comment("gamma", format_number(config.gamma));
    csv.comment("n_thermal", format_number(effective_n_thermal(config)));
    if (config.boltzmann_ratio) {
        csv.comment("boltzmann_ratio", format_number(*config.boltzmann_ratio));
    }
    csv.comment("truncation", format_number(config.truncation));
    csv.comment("gamma_dt", format_number(config.gdt));
    csv.comment("horizon_gamma_t", format_number(config.horizon));
    csv.comment("trajectories", format_number(config.n_traj));
    csv.comment("master_seed", format_number(config.master_seed));
    csv.comment("engine", engine_name(config.engine));
    csv.comment("mode", mode_name(config.mode));
    csv.comment("level", format_number(config.level));
    csv.comment("stream_derivation", kStreamDerivation);
    for (const auto& [key, value] : extra) {
        csv.comment(key, value);
    }
}

} // namespace qnd::cli
