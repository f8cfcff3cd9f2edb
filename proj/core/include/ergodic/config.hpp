#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "ergodic/model.hpp"

namespace ergodic {

/// Malformed or unsupported configuration. `path` is a JSON-pointer-like
/// location such as `model.states[1].actions[0].row`; parse errors carry
/// line and column in the message instead.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

enum class ProblemKind { mdp, ctmc, diffusion };
std::string_view to_string(ProblemKind k) noexcept;

using ProblemModel = std::variant<FiniteMdp, CtmcModel, DiffusionProblem>;

struct LoadedProblem {
  ProblemKind kind = ProblemKind::mdp;
  ProblemModel model;
  bool inline_model = false;  ///< tables came from the file rather than a builtin
  std::string resolved;       ///< JSON echo of kind/model/anchor with defaults filled in
};

/// Reads `kind`, `model` and `anchor` from a JSON document; other top-level
/// keys are ignored. Inline models are taken as written (no renormalization),
/// so a bad row surfaces later in validate().
LoadedProblem parse_problem(std::string_view json_text);

/// Field path of a validation violation in an inline model, e.g.
/// `model.states[0].actions[1].row`. Empty when there is no natural path.
std::string violation_path(const LoadedProblem& problem, const Violation& v);

}  // namespace ergodic
