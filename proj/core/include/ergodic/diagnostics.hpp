#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ergodic/model.hpp"
#include "ergodic/parabolic.hpp"

namespace ergodic {

// ---------------------------------------------------------------------------
// RVI / VI coupling
// ---------------------------------------------------------------------------

/// Offsets c_m with c_0 = 0, c_{m+1} = (1 - dt) c_m + dt (beta - vbar_m(anchor)).
/// For explicit Euler with a shared dt, the RVI iterate equals the VI iterate
/// plus c_m at every node.
std::vector<double> discrete_offsets(std::span<const double> vi_anchor_readings, double beta, double dt);

/// g(t_m) = e^{-t_m} int_0^{t_m} e^s (beta - vbar(s, anchor)) ds, trapezoidal
/// on the per-step anchor readings.
std::vector<double> continuum_offsets(std::span<const double> vi_anchor_readings, double beta, double dt);

struct VvIdentityResult {
  double exact_residual = 0.0;      ///< max_m sup_x |V_m - Vbar_m - c_m|
  double continuum_residual = 0.0;  ///< max over records of sup_x |V - Vbar - g(t)|
};

/// Both runs must share grid, dt, step count, record times and V0.
VvIdentityResult check_vv_identity(const ParabolicRun& rvi_run, const ParabolicRun& vi_run, double beta);

// ---------------------------------------------------------------------------
// Bounds and Lyapunov data
// ---------------------------------------------------------------------------

/// sup_x |f(x)| / V(x).
double weighted_norm(std::span<const double> f, std::span<const double> lyapunov);

struct BoundReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;     ///< max of |V* - Vbar| / allowed
  double initial_gap = 0.0;     ///< ||V* - V0||_V
  double sup_vi_weighted = 0.0; ///< sup over records of ||Vbar(t)||_V
  bool passed() const noexcept { return violations == 0; }
};

/// Right side of the a priori estimate: gap * (c0/c1 + v e^{-c1 t}).
double value_bound(double gap, const LyapunovData& ly, double v, double t) noexcept;

/// Checks |V*(x) - Vbar(t,x)| <= slack * value_bound(||V* - V0||_V, ..) + 1e-9
/// at every recorded time and core node. The absolute floor only absorbs
/// roundoff when V0 = V*.
BoundReport check_bound(const ValueField& vstar, const ParabolicRun& vi_run, const DiffusionProblem& problem,
                        double core_margin, double slack = 1.1);

struct LyapunovReport {
  bool passed = false;
  bool drift_ok = false;
  bool cost_ok = false;
  double worst_drift_margin = 0.0;  ///< min over rows, actions of c0 - c1 V - L^u V
  double worst_drift_x = 0.0;
  double worst_drift_u = 0.0;
  double worst_cost_margin = 0.0;   ///< min over nodes of c2 V - sup_u r
  double worst_cost_x = 0.0;
};

/// Sweeps the discretized L^u V <= c0 - c1 V over every evolving row and
/// action, and sup_u r <= c2 V over every node, up to 1e-9 (1 + c) of
/// roundoff. Fails when there is no Lyapunov data.
LyapunovReport verify_lyapunov(const DiffusionProblem& problem);

struct LyapunovRequirements {
  double required_c0 = 0.0;  ///< max_{i,u} L^u V(i) + c1 V(i)
  double required_c2 = 0.0;  ///< max_i sup_u r(i,u) / V(i)
};

/// Smallest (c0, c2) that would pass verify_lyapunov for the problem's c1.
LyapunovRequirements lyapunov_requirements(const DiffusionProblem& problem);

// ---------------------------------------------------------------------------
// Closed form for the LQ benchmark
// ---------------------------------------------------------------------------

struct LqSolution {
  double k = 0.0;     ///< V*(x) = k x^2
  double beta = 0.0;  ///< optimal average cost, 2k
  double value(double x) const noexcept { return k * x * x; }
  double control(double x) const noexcept { return -k * x; }
};

/// k solves k^2 + 2k - 1 = 0. Throws PreconditionError when the optimal
/// control k|x| exceeds u_max somewhere on |x| <= core_half_width.
LqSolution lq_exact(double u_max, double core_half_width = 2.5);

}  // namespace ergodic
