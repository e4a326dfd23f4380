#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "resbound/cli/config.hpp"
#include "resbound/cli/csv.hpp"

namespace resbound::cli {

/// Version string written into every output.
const char* version();

struct CommandOutput {
  CsvTable table;
  nlohmann::json sidecar;
  bool passed = true;  ///< false when a verification threshold is exceeded
};

CommandOutput cmd_bounds(const RunConfig& cfg);
CommandOutput cmd_sensitivity_curve(const RunConfig& cfg);
CommandOutput cmd_max_vs_s(const RunConfig& cfg);
CommandOutput cmd_fom_map(const RunConfig& cfg);
CommandOutput cmd_eqef_sweep(const RunConfig& cfg);
CommandOutput cmd_kk_phase(const RunConfig& cfg);
CommandOutput cmd_verify(const RunConfig& cfg);

/// Subcommand names in the order they are documented.
const std::vector<std::string>& command_names();

/// Runs the named command. Throws std::invalid_argument for unknown names.
CommandOutput run_command(const std::string& name, const RunConfig& cfg);

/// Runs a command and writes <output.dir>/<stem>.csv and .json. Returns 0 on
/// success and 1 when verification failed. Existing files are only replaced
/// when overwrite is true.
int execute(const std::string& name, const RunConfig& cfg, bool overwrite, std::ostream& log);

}  // namespace resbound::cli
