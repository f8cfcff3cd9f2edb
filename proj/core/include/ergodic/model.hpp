#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ergodic {

/// Absolute tolerance for row-stochasticity and zero-row-sum checks.
/// Rows are never renormalized; anything outside this band is reported.
inline constexpr double kRowSumTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was not met (dt above the CFL bound,
/// stepsize outside (0, 1], mismatched lengths, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A stationary policy induces a chain that is not irreducible, so the
/// stationary law or the Poisson system is singular.
class ReducibleChainError : public Error {
 public:
  ReducibleChainError(std::string message, std::vector<std::size_t> policy)
      : Error(std::move(message)), policy_(std::move(policy)) {}
  const std::vector<std::size_t>& policy() const noexcept { return policy_; }

 private:
  std::vector<std::size_t> policy_;
};

// ---------------------------------------------------------------------------
// Controlled chains
// ---------------------------------------------------------------------------

/// One admissible action at a state: a transition (or rate) row and its cost.
struct ActionRow {
  std::string label;
  std::vector<double> row;
  double cost = 0.0;
};

using StateActions = std::vector<ActionRow>;

/// Shared layout of the two finite-state models. `anchor` is the state whose
/// value normalizes relative value iteration; it defaults to the last state.
struct ControlledChain {
  std::vector<StateActions> states;
  std::size_t anchor = 0;

  std::size_t size() const noexcept { return states.size(); }
  const ActionRow& action(std::size_t state, std::size_t a) const { return states[state][a]; }
  /// Number of deterministic stationary policies, saturating at SIZE_MAX.
  std::size_t policy_count() const noexcept;
};

/// Discrete-time controlled chain: rows are transition probabilities.
struct FiniteMdp : ControlledChain {};

/// Continuous-time controlled chain: rows are generator (rate) rows.
struct CtmcModel : ControlledChain {};

FiniteMdp make_mdp(std::vector<StateActions> states, std::optional<std::size_t> anchor = {});
CtmcModel make_ctmc(std::vector<StateActions> states, std::optional<std::size_t> anchor = {});

// ---------------------------------------------------------------------------
// One-dimensional controlled diffusion
// ---------------------------------------------------------------------------

enum class DriftScheme {
  upwind,                  ///< forward difference for b > 0, backward for b < 0
  central_where_monotone,  ///< central difference when |b| dx <= 2a, upwind otherwise
};

enum class BoundaryKind {
  reflecting,  ///< mirrored ghost node; every row sums to zero
  dirichlet,   ///< end nodes frozen at their (cut-off) initial value
};

std::string_view to_string(DriftScheme s) noexcept;
std::string_view to_string(BoundaryKind b) noexcept;

/// Lyapunov witness tabulated on the grid: L^u V <= c0 - c1 V, sup_u r <= c2 V.
struct LyapunovData {
  std::vector<double> values;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Controlled diffusion dX = b(X,U) dt + sigma(X) dW on [-L, L], with every
/// coefficient tabulated on the uniform grid. Tables indexed [action][node]
/// for drift and cost.
struct DiffusionProblem {
  std::string name;
  double half_width = 0.0;
  double dx = 0.0;
  std::vector<double> grid;
  std::size_t anchor = 0;
  std::vector<double> actions;

  std::vector<std::vector<double>> drift;
  std::vector<double> sigma;
  std::vector<double> diffusivity;  // a = sigma^2 / 2
  std::vector<std::vector<double>> cost;
  std::optional<LyapunovData> lyapunov;

  DriftScheme drift_scheme = DriftScheme::central_where_monotone;
  BoundaryKind boundary = BoundaryKind::reflecting;

  std::size_t nodes() const noexcept { return grid.size(); }
  std::size_t action_count() const noexcept { return actions.size(); }
};

// ---------------------------------------------------------------------------
// Values and reports
// ---------------------------------------------------------------------------

/// Values over states or grid nodes. `stamp` is an iteration count for the
/// discrete solvers and continuous time for the ODE/PDE flows.
struct ValueField {
  std::vector<double> values;
  std::size_t anchor = 0;
  double stamp = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  double at_anchor() const { return values.at(anchor); }
  double operator[](std::size_t i) const { return values[i]; }
};

ValueField zero_field(std::size_t n, std::size_t anchor);

/// Returns a copy with `c` added to every entry.
ValueField shifted(const ValueField& v, double c);

/// Copy of `v` with the anchor value subtracted everywhere.
ValueField anchored(const ValueField& v);

/// max(v) - min(v); zero for empty input.
double span(std::span<const double> v) noexcept;
inline double span(const ValueField& v) noexcept { return span(std::span<const double>(v.values)); }

double sup_norm(std::span<const double> v) noexcept;
double sup_distance(std::span<const double> a, std::span<const double> b);

enum class SolveStatus { converged, max_steps, diverged };
std::string_view to_string(SolveStatus s) noexcept;

struct StepRecord {
  double stamp = 0.0;
  double beta_estimate = 0.0;
  double span = 0.0;
  double sup_change = 0.0;
  double hjb_residual = 0.0;
};

struct SolveReport {
  std::vector<StepRecord> records;
  ValueField terminal_value;
  double terminal_beta = 0.0;
  SolveStatus status = SolveStatus::max_steps;
  std::size_t steps = 0;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string message;
  std::optional<std::size_t> state;
  std::optional<std::size_t> action;
  std::optional<std::size_t> node;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const FiniteMdp& mdp);
ValidationReport validate(const CtmcModel& model);
ValidationReport validate(const DiffusionProblem& problem);

/// True when the graph with edge i->j iff the row entry is positive for
/// every action (the uniform minorizing graph) is strongly connected.
bool lower_bound_graph_irreducible(const ControlledChain& chain);

}  // namespace ergodic
