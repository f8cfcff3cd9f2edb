#include "ergodic/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergodic/generator.hpp"
#include "strings.hpp"

namespace ergodic {

namespace {

std::size_t step_index(double t, double dt) { return static_cast<std::size_t>(std::llround(t / dt)); }

bool evolving(const DiffusionProblem& p, std::size_t i) {
  return p.boundary != BoundaryKind::dirichlet || (i != 0 && i + 1 != p.nodes());
}

const LyapunovData& lyapunov_of(const DiffusionProblem& p) {
  if (!p.lyapunov) throw PreconditionError("problem '" + p.name + "' has no Lyapunov data");
  if (p.lyapunov->values.size() != p.nodes())
    throw PreconditionError("Lyapunov table length does not match the grid");
  return *p.lyapunov;
}

// The LQ drift bound is attained exactly on the grid (x = 3, u = 3), so the
// sweep must absorb roundoff in the stencil arithmetic.
constexpr double kLyapunovSlack = 1e-9;
constexpr double kBoundFloor = 1e-9;

}  // namespace

std::vector<double> discrete_offsets(std::span<const double> vi_anchor_readings, double beta, double dt) {
  std::vector<double> c(vi_anchor_readings.size(), 0.0);
  for (std::size_t m = 0; m + 1 < c.size(); ++m) c[m + 1] = (1.0 - dt) * c[m] + dt * (beta - vi_anchor_readings[m]);
  return c;
}

std::vector<double> continuum_offsets(std::span<const double> vi_anchor_readings, double beta, double dt) {
  std::vector<double> g(vi_anchor_readings.size(), 0.0);
  const double decay = std::exp(-dt);
  for (std::size_t m = 0; m + 1 < g.size(); ++m) {
    const double f0 = beta - vi_anchor_readings[m];
    const double f1 = beta - vi_anchor_readings[m + 1];
    g[m + 1] = decay * g[m] + 0.5 * dt * (decay * f0 + f1);
  }
  return g;
}

VvIdentityResult check_vv_identity(const ParabolicRun& rvi_run, const ParabolicRun& vi_run, double beta) {
  if (rvi_run.mode != ParabolicMode::Kind::rvi || vi_run.mode != ParabolicMode::Kind::vi)
    throw PreconditionError("check_vv_identity: expected an rvi run and a vi run");
  if (rvi_run.dt != vi_run.dt || rvi_run.steps != vi_run.steps ||
      rvi_run.record_times != vi_run.record_times || rvi_run.snapshots.empty() ||
      rvi_run.anchor_readings.size() != vi_run.anchor_readings.size())
    throw PreconditionError("check_vv_identity: runs differ in dt, step count or record times");
  for (std::size_t k = 0; k < rvi_run.snapshots.size(); ++k)
    if (rvi_run.snapshots[k].size() != vi_run.snapshots[k].size())
      throw PreconditionError("check_vv_identity: runs are on different grids");
  if (rvi_run.snapshots.front().values != vi_run.snapshots.front().values)
    throw PreconditionError("check_vv_identity: runs start from different V0");

  const double dt = rvi_run.dt;
  const auto c = discrete_offsets(vi_run.anchor_readings, beta, dt);
  const auto g = continuum_offsets(vi_run.anchor_readings, beta, dt);

  VvIdentityResult out;
  for (std::size_t m = 0; m < c.size(); ++m)
    out.exact_residual =
        std::max(out.exact_residual, std::abs(rvi_run.anchor_readings[m] - vi_run.anchor_readings[m] - c[m]));
  for (std::size_t k = 0; k < rvi_run.snapshots.size(); ++k) {
    const std::size_t m = std::min(step_index(rvi_run.record_times[k], dt), c.size() - 1);
    const auto& v = rvi_run.snapshots[k].values;
    const auto& w = vi_run.snapshots[k].values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double gap = v[i] - w[i];
      out.exact_residual = std::max(out.exact_residual, std::abs(gap - c[m]));
      out.continuum_residual = std::max(out.continuum_residual, std::abs(gap - g[m]));
    }
  }
  return out;
}

double weighted_norm(std::span<const double> f, std::span<const double> lyapunov) {
  if (f.size() != lyapunov.size()) throw PreconditionError("weighted_norm: length mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) out = std::max(out, std::abs(f[i]) / lyapunov[i]);
  return out;
}

double value_bound(double gap, const LyapunovData& ly, double v, double t) noexcept {
  return gap * (ly.c0 / ly.c1 + v * std::exp(-ly.c1 * t));
}

BoundReport check_bound(const ValueField& vstar, const ParabolicRun& vi_run, const DiffusionProblem& problem,
                        double core_margin, double slack) {
  const auto& ly = lyapunov_of(problem);
  if (vstar.size() != problem.nodes()) throw PreconditionError("check_bound: V* length does not match the grid");
  if (vi_run.snapshots.empty()) throw PreconditionError("check_bound: empty run");

  std::vector<double> diff(problem.nodes());
  const auto& v0 = vi_run.snapshots.front().values;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = vstar.values[i] - v0[i];

  BoundReport out;
  out.initial_gap = weighted_norm(diff, ly.values);
  const auto core = core_nodes(problem, core_margin);
  for (std::size_t k = 0; k < vi_run.snapshots.size(); ++k) {
    const double t = vi_run.record_times[k];
    const auto& v = vi_run.snapshots[k].values;
    out.sup_vi_weighted = std::max(out.sup_vi_weighted, weighted_norm(v, ly.values));
    for (auto i : core) {
      const double allowed = slack * value_bound(out.initial_gap, ly, ly.values[i], t) + kBoundFloor;
      const double ratio = std::abs(vstar.values[i] - v[i]) / allowed;
      ++out.samples;
      out.worst_ratio = std::max(out.worst_ratio, ratio);
      if (ratio > 1.0) ++out.violations;
    }
  }
  return out;
}

LyapunovReport verify_lyapunov(const DiffusionProblem& problem) {
  LyapunovReport out;
  if (!problem.lyapunov) return out;
  const auto& ly = lyapunov_of(problem);
  out.worst_drift_margin = std::numeric_limits<double>::infinity();
  out.worst_cost_margin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < problem.action_count(); ++a) {
    const auto st = discretize_generator(problem, a);
    for (std::size_t i = 0; i < problem.nodes(); ++i) {
      if (!evolving(problem, i)) continue;
      const double margin = ly.c0 - ly.c1 * ly.values[i] - st.apply(ly.values, i);
      if (margin < out.worst_drift_margin) {
        out.worst_drift_margin = margin;
        out.worst_drift_x = problem.grid[i];
        out.worst_drift_u = problem.actions[a];
      }
    }
  }
  for (std::size_t i = 0; i < problem.nodes(); ++i) {
    double sup_r = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < problem.action_count(); ++a) sup_r = std::max(sup_r, problem.cost[a][i]);
    const double margin = ly.c2 * ly.values[i] - sup_r;
    if (margin < out.worst_cost_margin) {
      out.worst_cost_margin = margin;
      out.worst_cost_x = problem.grid[i];
    }
  }
  out.drift_ok = out.worst_drift_margin >= -kLyapunovSlack * (1.0 + ly.c0);
  out.cost_ok = out.worst_cost_margin >= -kLyapunovSlack * (1.0 + ly.c2);
  out.passed = out.drift_ok && out.cost_ok;
  return out;
}

LyapunovRequirements lyapunov_requirements(const DiffusionProblem& problem) {
  const auto& ly = lyapunov_of(problem);
  LyapunovRequirements out;
  out.required_c0 = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < problem.action_count(); ++a) {
    const auto st = discretize_generator(problem, a);
    for (std::size_t i = 0; i < problem.nodes(); ++i)
      if (evolving(problem, i))
        out.required_c0 = std::max(out.required_c0, st.apply(ly.values, i) + ly.c1 * ly.values[i]);
  }
  for (std::size_t i = 0; i < problem.nodes(); ++i)
    for (std::size_t a = 0; a < problem.action_count(); ++a)
      out.required_c2 = std::max(out.required_c2, problem.cost[a][i] / ly.values[i]);
  return out;
}

LqSolution lq_exact(double u_max, double core_half_width) {
  LqSolution s;
  s.k = std::sqrt(2.0) - 1.0;
  s.beta = 2.0 * s.k;
  if (!(u_max >= s.k * core_half_width))
    throw PreconditionError("lq_exact: u_max=" + format_real(u_max) + " clips the optimal control k|x| on |x|<=" +
                            format_real(core_half_width));
  return s;
}

}  // namespace ergodic
