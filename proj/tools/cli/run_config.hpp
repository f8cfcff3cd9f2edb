#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ergodic/config.hpp"
#include "ergodic/ctmc_rvi.hpp"
#include "ergodic/discrete_rvi.hpp"

namespace ergodic::cli {

enum class Algorithm { white, bertsekas, ctmc_rvi, ctmc_vi, pde_rvi, pde_vi, oracle };
std::string_view to_string(Algorithm a) noexcept;

struct SolverOptions {
  double tol = 0.0;
  std::size_t max_iters = 100000;
  double dt = 0.0;
  double T = 0.0;
  double damping = 1.0;
  double gamma = 0.5;
  StepsizeSchedule schedule = StepsizeSchedule::constant;
  std::size_t record_every = 1;
  double core_margin = 0.0;
  OdeMethod method = OdeMethod::rk4;
  std::optional<double> beta;  // vi flows; oracle beta when absent
  double blowup = 1e12;
};

enum class OracleKind { automatic, closed_form, discrete };

struct CompareOptions {
  double beta_tol = 0.0;
  double value_tol = 0.0;
  bool relative = false;
  double bound_slack = 1.1;
  double identity_tol = 1e-9;
  OracleKind oracle = OracleKind::automatic;
};

struct RunConfig {
  LoadedProblem problem;
  Algorithm algorithm = Algorithm::oracle;
  SolverOptions options;
  CompareOptions compare;
  std::filesystem::path out_dir = ".";
  bool field_csv = true;
  std::string resolved;  // full config echo, JSON text
};

/// Parses and resolves a run config. Numeric defaults depend on the problem
/// kind; every resolved value is echoed in `resolved`. Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace ergodic::cli
