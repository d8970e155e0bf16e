// csv.hpp: bit-stable CSV output with '#'-prefixed metadata.

#pragma once

#include <concepts>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qnd/cli/config.hpp"

namespace qnd::cli {

// Shortest decimal representation that parses back to the same double.
std::string format_number(double value);

template <std::integral T>
std::string format_number(T value) {
    return std::to_string(value);
}

inline std::string format_number(std::string_view text) { return std::string(text); }

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void comment(std::string_view key, std::string_view value);
    void header(std::initializer_list<std::string_view> columns);
    // Separates consecutive tables inside one output.
    void blank_line();

    template <typename... Cells>
    void row(const Cells&... cells) {
        std::string line;
        ((line += format_number(cells), line += ','), ...);
        line.pop_back();
        out_ << line << '\n';
    }

private:
    std::ostream& out_;
};

// Echo of the configuration, seeds and version ahead of every table.
void write_metadata(CsvWriter& csv, const RunConfig& config, std::string_view command,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

} // namespace qnd::cli
