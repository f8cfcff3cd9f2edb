#include "ergodic/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ergodic/report_io.hpp"
#include "strings.hpp"

namespace ergodic {

namespace {

void check_cfl(const DiffusionProblem& problem, double dt) {
  const double limit = cfl_max_dt(problem);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw PreconditionError("dt=" + format_real(dt) + " violates the CFL bound " + format_real(limit));
}

bool is_held(const DiffusionProblem& p, std::size_t i) {
  return p.boundary == BoundaryKind::dirichlet && (i == 0 || i + 1 == p.nodes());
}

}  // namespace

double ParabolicMode::shift(const ValueField& v) const {
  switch (kind) {
    case Kind::rvi: return v.at_anchor();
    case Kind::vi: return beta;
    case Kind::truncated: return forcing(v.stamp);
  }
  return 0.0;
}

std::string_view to_string(ParabolicMode::Kind k) noexcept {
  switch (k) {
    case ParabolicMode::Kind::rvi: return "rvi";
    case ParabolicMode::Kind::vi: return "vi";
    case ParabolicMode::Kind::truncated: return "truncated";
  }
  return "?";
}

double cutoff_weight(double x, double radius) noexcept {
  const double r = std::abs(x);
  if (r <= 0.5 * radius) return 1.0;
  if (r >= 0.75 * radius) return 0.0;
  const double s = (r - 0.5 * radius) / (0.25 * radius);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

ValueField apply_cutoff(const DiffusionProblem& problem, const ValueField& v0) {
  ValueField out = v0;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= cutoff_weight(problem.grid[i], problem.half_width);
  return out;
}

ValueField step(const DiffusionProblem& problem, const ValueField& v, const ParabolicMode& mode, double dt) {
  if (v.size() != problem.nodes()) throw PreconditionError("step: field length does not match the grid");
  check_cfl(problem, dt);
  const ControlledGenerator gen(problem);
  std::vector<double> m(v.size());
  gen.minimize(v.values, m);
  const double s = mode.shift(v);
  ValueField out = v;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!is_held(problem, i)) out.values[i] = v.values[i] + dt * (m[i] - s);
  out.stamp = v.stamp + dt;
  return out;
}

ParabolicResult solve_parabolic(const DiffusionProblem& problem, const ValueField& v0, const ParabolicMode& mode,
                                const ParabolicOptions& opts) {
  if (v0.size() != problem.nodes()) throw PreconditionError("solve_parabolic: V0 length does not match the grid");
  for (double x : v0.values)
    if (!std::isfinite(x)) throw PreconditionError("solve_parabolic: V0 is not finite");
  if (mode.kind == ParabolicMode::Kind::truncated && !mode.forcing)
    throw PreconditionError("solve_parabolic: truncated mode needs a forcing g(t)");

  const double dt = opts.dt > 0.0 ? opts.dt : cfl_max_dt(problem);
  check_cfl(problem, dt);
  if (!(opts.T >= dt)) throw PreconditionError("solve_parabolic: T must be >= dt");
  const auto steps = static_cast<std::size_t>(std::ceil(opts.T / dt - 1e-9));
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);
  const double margin = std::isnan(opts.core_margin) ? default_core_margin(problem) : opts.core_margin;
  const auto core = core_nodes(problem, margin);

  ValueField v = problem.boundary == BoundaryKind::dirichlet ? apply_cutoff(problem, v0) : v0;
  v.anchor = problem.anchor;
  v.stamp = 0.0;

  const ControlledGenerator gen(problem);
  const std::size_t n = problem.nodes();
  std::vector<double> m(n);
  std::vector<std::size_t> policy(n);

  ParabolicResult result;
  auto& run = result.run;
  auto& report = result.report;
  run.mode = mode.kind;
  run.beta = mode.beta;
  run.dt = dt;
  run.anchor_readings.reserve(steps + 1);

  auto estimate_of = [&](const ValueField& f, double s) { return mode.kind == ParabolicMode::Kind::vi ? s : f.at_anchor(); };

  for (std::size_t k = 0;; ++k) {
    run.anchor_readings.push_back(v.at_anchor());
    const bool record = (k % every == 0) || k == steps;
    if (record)
      gen.minimize(v.values, m, policy);
    else
      gen.minimize(v.values, m);

    const double s = mode.shift(v);
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!is_held(problem, i)) rate = std::max(rate, std::abs(m[i] - s));

    const double est = estimate_of(v, s);
    const bool converged = opts.tol > 0.0 && rate <= opts.tol;
    const bool last = k == steps || converged;
    if (record || last) {
      if (!record) gen.minimize(v.values, m, policy);
      double res = 0.0;
      for (auto i : core) res = std::max(res, std::abs(m[i] - est));
      run.record_times.push_back(v.stamp);
      run.snapshots.push_back(v);
      run.policies.push_back(PolicySelection{policy});
      report.records.push_back({v.stamp, est, span(v), rate, res});
    }
    if (last) {
      report.status = converged ? SolveStatus::converged : SolveStatus::max_steps;
      break;
    }

    for (std::size_t i = 0; i < n; ++i)
      if (!is_held(problem, i)) v.values[i] += dt * (m[i] - s);
    v.stamp = static_cast<double>(k + 1) * dt;
    run.steps = k + 1;

    bool finite = true;
    for (double x : v.values) finite = finite && std::isfinite(x);
    if (!finite || span(v) > opts.blowup) {
      run.anchor_readings.push_back(v.at_anchor());
      run.record_times.push_back(v.stamp);
      run.snapshots.push_back(v);
      run.policies.push_back(PolicySelection{policy});
      report.records.push_back({v.stamp, v.at_anchor(), span(v), std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity()});
      report.status = SolveStatus::diverged;
      break;
    }
  }

  run.final_policy = run.policies.back();
  report.steps = run.steps;
  report.terminal_value = run.snapshots.back();
  report.terminal_beta = report.records.back().beta_estimate;
  return result;
}

void write_field_csv(std::ostream& os, const ParabolicRun& run, const DiffusionProblem& problem) {
  os << "t,x,value,policy\n";
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const auto& f = run.snapshots[k];
    const auto& pol = run.policies[k].actions;
    for (std::size_t i = 0; i < f.size(); ++i) {
      os << format_csv(run.record_times[k]) << ',' << format_csv(problem.grid[i]) << ',' << format_csv(f.values[i])
         << ',' << format_csv(problem.actions[pol[i]]) << '\n';
    }
  }
}

}  // namespace ergodic
