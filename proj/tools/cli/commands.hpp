#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ergodic::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kConfigError = 2,
  kDiverged = 3,
  kComparisonFailure = 4,
};

/// Parses the config and validates the model. Prints one line per violation
/// (prefixed with its field path when there is one).
int cmd_validate(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

/// Runs the configured algorithm and writes trace.csv, summary.json and, for
/// diffusion problems, field.csv into `out_dir` (or the config's output.dir).
int cmd_solve(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
              std::ostream& out, std::ostream& err);

/// Runs the configured algorithm and the matching oracle and writes
/// compare.json next to the solve artifacts. Diffusion problems also get the
/// rvi/vi identity check and, with Lyapunov data, the a priori bound.
int cmd_compare(const std::filesystem::path& config, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err);

}  // namespace ergodic::cli
