#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ergodic/discrete_rvi.hpp"
#include "ergodic/model.hpp"

namespace ergodic {

/// Discretized L^u for one action, in increment form:
///   (L phi)_i = lower_i (phi_{i-1} - phi_i) + upper_i (phi_{i+1} - phi_i)
/// so `diag` is always -(lower + upper). Reflecting end rows fold the ghost
/// node into the single neighbour; Dirichlet end rows are zero.
struct GeneratorStencil {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const noexcept { return diag.size(); }
  double apply(std::span<const double> phi, std::size_t i) const;
};

/// Interior row i:
///   a_i (phi_{i+1} - 2 phi_i + phi_{i-1}) / dx^2 + drift term,
/// where the drift term is b+ (phi_{i+1} - phi_i)/dx - b- (phi_i - phi_{i-1})/dx
/// under upwinding, or b (phi_{i+1} - phi_{i-1}) / (2 dx) when the problem's
/// scheme allows central differencing at that node (|b| dx <= 2 a).
/// Off-diagonals are nonnegative in both cases.
GeneratorStencil discretize_generator(const DiffusionProblem& problem, std::size_t action);

/// Stencils for every action plus tabulated costs, laid out action-major for
/// the per-node minimization. Immutable once built.
class ControlledGenerator {
 public:
  explicit ControlledGenerator(const DiffusionProblem& problem);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t actions() const noexcept { return actions_; }
  const GeneratorStencil& stencil(std::size_t action) const { return stencils_[action]; }

  /// out_i = min_u [ (L^u v)_i + r(x_i, u) ]; `policy` (optional, may be
  /// empty) receives the lowest minimizing action index.
  void minimize(std::span<const double> v, std::span<double> out, std::span<std::size_t> policy = {}) const;

  /// Largest |diag| over rows and actions.
  double max_rate() const noexcept { return max_rate_; }

 private:
  std::size_t nodes_ = 0;
  std::size_t actions_ = 0;
  std::vector<GeneratorStencil> stencils_;
  std::vector<double> cost_;  // [action * nodes + node]
  double max_rate_ = 0.0;
};

struct RhsMinResult {
  std::vector<double> values;
  PolicySelection policy;
};

/// Per-node min over the action grid of stencil . v + r(x, u).
RhsMinResult rhs_min(const DiffusionProblem& problem, const ValueField& v);

/// 1 / max_{i,u} (2 a_i / dx^2 + |b_{i,u}| / dx). Any dt at or below this keeps
/// the explicit step monotone under either drift scheme.
double cfl_max_dt(const DiffusionProblem& problem);

/// Indices of nodes with |x| <= L - margin (and not a Dirichlet end node).
std::vector<std::size_t> core_nodes(const DiffusionProblem& problem, double margin);

/// Default core margin: half the domain (compare on |x| <= L/2).
inline double default_core_margin(const DiffusionProblem& problem) noexcept { return 0.5 * problem.half_width; }

/// sup over core nodes of | min_u [L^u v + r] - beta |.
double hjb_residual(const DiffusionProblem& problem, const ValueField& v, double beta, double core_margin);

/// The discretized problem as a controlled chain on the grid nodes: one rate
/// row per (node, action). Dirichlet end rows are all zero, so only reflecting
/// problems give an irreducible chain.
CtmcModel to_ctmc(const DiffusionProblem& problem);

/// max over core nodes and actions of a(x) + |b(x,u)|; scale for residual bounds.
double coefficient_scale(const DiffusionProblem& problem, double core_margin);

}  // namespace ergodic
