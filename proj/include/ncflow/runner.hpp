#pragma once

#include <string>

#include "ncflow/errors.hpp"

namespace ncflow {

inline constexpr const char* tool_version = "0.1.0";

// Process exit codes: 0 success, 2 configuration or input error,
// 3 admissibility precondition failed, 4 non-convergence or numerical
// failure, 5 certificate hypothesis or validity window violated.
// 1 is reserved for unexpected internal errors.
int cli_exit_code(ErrorKind kind);

// Runs one subcommand against a config file and writes a self-describing
// run directory (manifest.json with every resolved value, CSV and JSON
// outputs, summary.txt).  Nothing is written when the configuration is
// rejected.  Returns the process exit code.
int run_command(const std::string& command, const std::string& config_path);

// Rebuilds plain-text plot data (two numeric columns, '#' comments) from a
// finished run directory.  Unknown or incomplete directories exit with the
// input-error code.
int emit_plots(const std::string& run_dir);

} // namespace ncflow
