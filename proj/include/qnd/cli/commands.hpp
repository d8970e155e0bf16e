// commands.hpp: the qndsim subcommands.
//
// Each command writes its tables to `out`, diagnostics to `log`, and returns
// the process exit code: 0 success, 1 usage/config error, 2 validation or
// statistical failure.

#pragma once

#include <ostream>
#include <string_view>

#include "qnd/cli/config.hpp"

namespace qnd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

int cmd_thermal(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_relax(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_survival(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_dwell(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_zeno(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& log);

// Dispatches by subcommand name and maps exceptions onto exit codes.
int run_command(std::string_view name, const RunConfig& config, std::ostream& out, std::ostream& log);

} // namespace qnd::cli
