#pragma once

#include "gapkin_cli/config.hpp"
#include "gapkin_cli/report.hpp"

#include <functional>
#include <map>
#include <string>

namespace gapkin::cli {

// A command computes everything in memory; the caller decides where the
// files go. Keys of `files` are file names inside the output directory.
struct CommandResult {
  RunReport report;
  std::map<std::string, std::string> files;
};

using Command = std::function<CommandResult(const RunConfig&, int threads)>;

CommandResult cmd_geometry_check(const RunConfig& c, int threads);
CommandResult cmd_validate_wall(const RunConfig& c, int threads);
CommandResult cmd_simulate(const RunConfig& c, int threads);
CommandResult cmd_spectrum(const RunConfig& c, int threads);
CommandResult cmd_invariant(const RunConfig& c, int threads);
CommandResult cmd_laplace_check(const RunConfig& c, int threads);
CommandResult cmd_acceptance(const RunConfig& c, int threads);

//! Name -> command, in display order.
const std::map<std::string, Command>& commands();

//! Checks that need the built model (points inside the domain, wall type
//! required by the chosen initial data or command, ...). Throws ConfigError.
void validate_semantics(const RunConfig& c, const std::string& command);

//! "# config_hash=<hex> seed=<n>" line that opens every CSV.
std::string csv_preamble(const RunConfig& c);

} // namespace gapkin::cli
