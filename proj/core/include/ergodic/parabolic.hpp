#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "ergodic/discrete_rvi.hpp"
#include "ergodic/generator.hpp"
#include "ergodic/model.hpp"

namespace ergodic {

/// What is subtracted from min_u [L^u v + r] at each step:
///   rvi       -> v(t, anchor)
///   vi        -> beta (assumed known)
///   truncated -> g(t), an arbitrary bounded forcing
struct ParabolicMode {
  enum class Kind { rvi, vi, truncated };

  Kind kind = Kind::rvi;
  double beta = 0.0;
  std::function<double(double)> forcing;

  static ParabolicMode rvi() { return {}; }
  static ParabolicMode vi(double beta) { return {Kind::vi, beta, {}}; }
  static ParabolicMode truncated(std::function<double(double)> g) { return {Kind::truncated, 0.0, std::move(g)}; }

  double shift(const ValueField& v) const;
};

std::string_view to_string(ParabolicMode::Kind k) noexcept;

/// Smooth cutoff psi_R: 1 on |x| <= R/2, 0 on |x| >= 3R/4, quintic C^2
/// transition in between.
double cutoff_weight(double x, double radius) noexcept;

/// V0 * psi_L on the problem grid.
ValueField apply_cutoff(const DiffusionProblem& problem, const ValueField& v0);

/// One explicit Euler step v' = v + dt (rhs_min(v) - shift). Dirichlet end
/// nodes are held. Throws PreconditionError when dt exceeds cfl_max_dt.
ValueField step(const DiffusionProblem& problem, const ValueField& v, const ParabolicMode& mode, double dt);

struct ParabolicOptions {
  double T = 20.0;
  double dt = 0.0;  ///< 0 selects cfl_max_dt
  std::size_t record_every = 100;
  double tol = 0.0;  ///< stop once sup|dv/dt| <= tol; 0 never stops early
  double core_margin = std::numeric_limits<double>::quiet_NaN();  ///< NaN selects L/2
  double blowup = 1e12;
};

struct ParabolicRun {
  ParabolicMode::Kind mode = ParabolicMode::Kind::rvi;
  double beta = 0.0;  ///< vi mode only
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> record_times;
  std::vector<ValueField> snapshots;
  std::vector<PolicySelection> policies;  ///< minimizer at each snapshot
  std::vector<double> anchor_readings;    ///< v(m dt, anchor) for m = 0..steps
  PolicySelection final_policy;
};

struct ParabolicResult {
  ParabolicRun run;
  SolveReport report;
};

/// Time-marches from V0 (cut off by psi_L first when the boundary is
/// Dirichlet) for ceil(T / dt) steps or until sup|dv/dt| <= tol. The first
/// and last states are always recorded.
ParabolicResult solve_parabolic(const DiffusionProblem& problem, const ValueField& v0, const ParabolicMode& mode,
                                const ParabolicOptions& opts = {});

/// CSV with header `t,x,value,policy`; policy is the minimizing action value.
void write_field_csv(std::ostream& os, const ParabolicRun& run, const DiffusionProblem& problem);

}  // namespace ergodic
