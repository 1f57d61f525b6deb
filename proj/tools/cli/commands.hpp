#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace ramem::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

/// Shortest text with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// Writes header + rows; the file is replaced atomically enough for batch use.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Runs one command and writes its files under config.output_dir.
/// Returns the one-line summary.
std::string run_command(const RunConfig& config);

/// Full command-line entry point: argument parsing, config loading, dispatch
/// and error reporting. Returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ramem::cli
