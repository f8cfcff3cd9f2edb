#include "ergodic/ctmc_rvi.hpp"

#include <cmath>
#include <limits>

#include "linalg.hpp"
#include "strings.hpp"

namespace ergodic {

namespace {

constexpr std::ptrdiff_t kParallelStates = 256;

// min_u sum_{j != i} q_ij(u) (h_j - h_i) + r(i,u); the difference form keeps
// the result invariant under h -> h + c up to rounding in the differences.
void chain_min(const CtmcModel& model, std::span<const double> h, std::span<double> out,
               std::vector<std::size_t>* argmin) {
  const auto n = static_cast<std::ptrdiff_t>(model.size());
#pragma omp parallel for if (n >= kParallelStates) schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto& acts = model.states[i];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < acts.size(); ++a) {
      double s = acts[a].cost;
      const auto& row = acts[a].row;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j == i) continue;
        s += row[j] * (h[j] - h[i]);
      }
      if (s < best) {
        best = s;
        best_a = a;
      }
    }
    out[i] = best;
    if (argmin) (*argmin)[i] = best_a;
  }
}

void require_length(const CtmcModel& model, std::size_t n, const char* who) {
  if (n != model.size())
    throw PreconditionError(std::string(who) + ": value length " + std::to_string(n) + " != " +
                            std::to_string(model.size()) + " states");
}

bool blown_up(std::span<const double> v, double bound) {
  for (double x : v)
    if (!std::isfinite(x)) return true;
  return span(v) > bound;
}

}  // namespace

BellmanResult ctmc_min(const CtmcModel& model, const ValueField& h) {
  require_length(model, h.size(), "ctmc_min");
  BellmanResult out;
  out.value = ValueField{std::vector<double>(h.size()), h.anchor, h.stamp};
  out.policy.actions.resize(h.size());
  chain_min(model, h.values, out.value.values, &out.policy.actions);
  return out;
}

std::vector<double> ctmc_rvi_rhs(const CtmcModel& model, const ValueField& h) {
  auto m = ctmc_min(model, h);
  const double s = h.at_anchor();
  for (auto& x : m.value.values) x -= s;
  return std::move(m.value.values);
}

std::vector<double> ctmc_vi_rhs(const CtmcModel& model, const ValueField& h, double beta) {
  auto m = ctmc_min(model, h);
  for (auto& x : m.value.values) x -= beta;
  return std::move(m.value.values);
}

double ctmc_hjb_residual(const CtmcModel& model, const ValueField& v, double beta) {
  const auto m = ctmc_min(model, v);
  double res = 0.0;
  for (double x : m.value.values) res = std::max(res, std::abs(x - beta));
  return res;
}

double max_exit_rate(const CtmcModel& model) noexcept {
  double q = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i)
    for (const auto& act : model.states[i])
      if (i < act.row.size()) q = std::max(q, std::abs(act.row[i]));
  return q;
}

OdeTrace integrate(const OdeRhs& rhs, const ValueField& h0, const OdeOptions& opts) {
  if (!(opts.dt > 0.0)) throw PreconditionError("integrate: dt must be positive");
  if (!(opts.T >= opts.dt)) throw PreconditionError("integrate: T must be >= dt");
  const auto steps = static_cast<std::size_t>(std::llround(opts.T / opts.dt));
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);
  const std::size_t n = h0.size();
  const double dt = opts.dt;

  OdeTrace trace;
  std::vector<double> h = h0.values;
  auto record = [&](std::size_t m) {
    const double t = static_cast<double>(m) * dt;
    trace.times.push_back(t);
    trace.fields.push_back(ValueField{h, h0.anchor, t});
    trace.beta_estimates.push_back(h[h0.anchor]);
  };
  record(0);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t m = 1; m <= steps; ++m) {
    if (opts.method == OdeMethod::euler) {
      rhs(h, k1);
      for (std::size_t i = 0; i < n; ++i) h[i] += dt * k1[i];
    } else {
      rhs(h, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k1[i];
      rhs(tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + 0.5 * dt * k2[i];
      rhs(tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = h[i] + dt * k3[i];
      rhs(tmp, k4);
      for (std::size_t i = 0; i < n; ++i) h[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (blown_up(h, opts.blowup)) {
      trace.diverged = true;
      record(m);
      break;
    }
    if (m % every == 0 || m == steps) record(m);
  }
  return trace;
}

SolveReport solve_ctmc(const CtmcModel& model, CtmcFlow flow, const OdeOptions& opts, double tol, double beta,
                       const ValueField* h0) {
  if (opts.method == OdeMethod::euler && max_exit_rate(model) * opts.dt > 1.0)
    throw PreconditionError("solve_ctmc: Euler step dt=" + format_real(opts.dt) +
                            " violates max|q_ii| dt <= 1 (max|q_ii| = " + format_real(max_exit_rate(model)) + ")");
  ValueField start = h0 ? *h0 : zero_field(model.size(), model.anchor);
  require_length(model, start.size(), "solve_ctmc");
  start.anchor = model.anchor;
  start.stamp = 0.0;

  const std::size_t n = model.size();
  OdeRhs rhs = [&](std::span<const double> h, std::span<double> out) {
    chain_min(model, h, out, nullptr);
    const double s = flow == CtmcFlow::rvi ? h[model.anchor] : beta;
    for (std::size_t i = 0; i < n; ++i) out[i] -= s;
  };
  const auto trace = integrate(rhs, start, opts);

  SolveReport report;
  std::vector<double> f(n);
  for (std::size_t k = 0; k < trace.fields.size(); ++k) {
    const auto& field = trace.fields[k];
    rhs(field.values, f);
    const double rate = sup_norm(f);
    const double est = flow == CtmcFlow::rvi ? field.at_anchor() : beta;
    report.records.push_back({trace.times[k], est, span(field), rate, ctmc_hjb_residual(model, field, est)});
  }
  report.steps = static_cast<std::size_t>(std::llround(trace.times.back() / opts.dt));
  report.terminal_value = trace.fields.back();
  report.terminal_beta = report.records.back().beta_estimate;
  if (trace.diverged)
    report.status = SolveStatus::diverged;
  else
    report.status = report.records.back().sup_change <= tol ? SolveStatus::converged : SolveStatus::max_steps;
  return report;
}

ErgodicSolution exact_ctmc(const CtmcModel& model) {
  const auto opt = detail::solve_chain_exactly(model, /*continuous_time=*/true);
  ErgodicSolution out;
  out.value = ValueField{opt.value, model.anchor, 0.0};
  out.beta = opt.beta;
  out.policy.actions = opt.policy;
  out.residual = ctmc_hjb_residual(model, out.value, out.beta);
  return out;
}

}  // namespace ergodic
