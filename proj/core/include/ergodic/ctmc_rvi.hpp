#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ergodic/discrete_rvi.hpp"
#include "ergodic/model.hpp"

namespace ergodic {

/// dh/dt = min_u [ Q(u) h + r(u) ] - h(anchor) 1
std::vector<double> ctmc_rvi_rhs(const CtmcModel& model, const ValueField& h);

/// dh/dt = min_u [ Q(u) h + r(u) ] - beta 1
std::vector<double> ctmc_vi_rhs(const CtmcModel& model, const ValueField& h, double beta);

/// min_u [ Q(u) h + r(u) ] per state and its selector.
BellmanResult ctmc_min(const CtmcModel& model, const ValueField& h);

/// sup_i | min_u [ Q(u) v + r(u) ](i) - beta |
double ctmc_hjb_residual(const CtmcModel& model, const ValueField& v, double beta);

/// max over states and actions of |q_ii(u)|.
double max_exit_rate(const CtmcModel& model) noexcept;

enum class OdeMethod { euler, rk4 };

/// Writes f(h) into `out`; both spans have the state count.
using OdeRhs = std::function<void(std::span<const double> h, std::span<double> out)>;

struct OdeOptions {
  double dt = 0.01;
  double T = 50.0;
  OdeMethod method = OdeMethod::rk4;
  std::size_t record_every = 1;
  double blowup = 1e12;
};

/// Fixed-step solution samples. `beta_estimates[k]` is the anchor reading of
/// `fields[k]`; `times` always starts at 0 and ends at the final step.
struct OdeTrace {
  std::vector<double> times;
  std::vector<ValueField> fields;
  std::vector<double> beta_estimates;
  bool diverged = false;
};

/// Integrates with round(T / dt) fixed steps of `method`. Divergence (non-finite
/// entries or span above `blowup`) stops the run with `diverged` set.
OdeTrace integrate(const OdeRhs& rhs, const ValueField& h0, const OdeOptions& opts);

enum class CtmcFlow { rvi, vi };

/// Runs the RVI (or VI, with `beta`) flow and summarizes it as a SolveReport.
/// Euler is rejected when max |q_ii| dt > 1. Converged iff the final
/// sup-norm rate of change is <= tol.
SolveReport solve_ctmc(const CtmcModel& model, CtmcFlow flow, const OdeOptions& opts, double tol = 1e-8,
                       double beta = 0.0, const ValueField* h0 = nullptr);

/// Exact oracle: enumerates stationary policies, picks the minimal stationary
/// average cost, solves Q_v V = beta 1 - r_v with V(anchor) = 0.
ErgodicSolution exact_ctmc(const CtmcModel& model);

}  // namespace ergodic
