#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace aclab::cli {

// Executes a parsed config: dispatches on cfg.command and writes the
// command's artifact files into cfg.output.directory. Throws aclab errors on
// failure; progress goes to stderr, one line per cell.
void run_command(const RunConfig& cfg);

// Full CLI: `aclab run --config <path> [--out <dir>] [--threads N] [--seed S]`.
// args excludes the program name. Returns the process exit code:
// 0 success, 2 config/usage error, 3 numeric or overflow abort.
int run_cli(const std::vector<std::string>& args);

}  // namespace aclab::cli
