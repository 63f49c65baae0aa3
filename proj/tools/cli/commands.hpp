#pragma once

// Command dispatch for the sublin tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace sublin::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kHypothesisFailure = 2, kNonConvergence = 3 };

struct RunOptions {
  std::string command;
  std::filesystem::path config_path;
  /// Overrides [output] dir.
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned long long> seed;
  bool verbose = false;
};

const std::vector<std::string>& command_names();

/// Loads the config, runs the command, writes artifacts and manifest.json.
/// Errors are mapped to exit codes and reported on `err`.
int run_command(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Same, for an already parsed config.
int run_command(const RunOptions& options, const Config& config, std::ostream& out, std::ostream& err);

}  // namespace sublin::cli
