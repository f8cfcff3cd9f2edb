#include "ergodic/discrete_rvi.hpp"

#include <cmath>
#include <limits>

#include "linalg.hpp"

namespace ergodic {

namespace {

constexpr std::size_t kNoSkip = std::numeric_limits<std::size_t>::max();
constexpr std::ptrdiff_t kParallelStates = 256;

void require_length(const ControlledChain& chain, const ValueField& v, const char* who) {
  if (v.size() != chain.size())
    throw PreconditionError(std::string(who) + ": value length " + std::to_string(v.size()) + " != " +
                            std::to_string(chain.size()) + " states");
}

// min_u [ r(i,u) + sum_{j != skip} p_ij(u) v(j) ] per state, lowest index on ties.
void min_expected(const ControlledChain& chain, const std::vector<double>& v, std::size_t skip,
                  std::vector<double>& out, std::vector<std::size_t>& argmin) {
  const auto n = static_cast<std::ptrdiff_t>(chain.size());
  out.resize(chain.size());
  argmin.resize(chain.size());
#pragma omp parallel for if (n >= kParallelStates) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& acts = chain.states[static_cast<std::size_t>(i)];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    for (std::size_t a = 0; a < acts.size(); ++a) {
      double s = acts[a].cost;
      const auto& row = acts[a].row;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j == skip) continue;
        s += row[j] * v[j];
      }
      if (s < best) {
        best = s;
        best_a = a;
      }
    }
    out[static_cast<std::size_t>(i)] = best;
    argmin[static_cast<std::size_t>(i)] = best_a;
  }
}

bool finite_values(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

BellmanResult bellman_min(const FiniteMdp& mdp, const ValueField& v) {
  require_length(mdp, v, "bellman_min");
  BellmanResult out;
  out.value.anchor = v.anchor;
  out.value.stamp = v.stamp;
  min_expected(mdp, v.values, kNoSkip, out.value.values, out.policy.actions);
  return out;
}

double poisson_residual(const FiniteMdp& mdp, const ValueField& v, double beta) {
  const auto F = bellman_min(mdp, v);
  double res = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) res = std::max(res, std::abs(F.value.values[i] - beta - v.values[i]));
  return res;
}

RviStep white_step(const FiniteMdp& mdp, const ValueField& h) {
  auto F = bellman_min(mdp, h);
  RviStep out;
  out.lambda = F.value.at_anchor();
  out.h = std::move(F.value);
  for (auto& x : out.h.values) x -= out.lambda;
  out.h.stamp = h.stamp + 1.0;
  return out;
}

RviStep bertsekas_step(const FiniteMdp& mdp, const ValueField& h, double lambda, double gamma) {
  require_length(mdp, h, "bertsekas_step");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionError("bertsekas_step: gamma must lie in (0, 1]");
  RviStep out;
  std::vector<std::size_t> argmin;
  out.h.anchor = h.anchor;
  out.h.stamp = h.stamp + 1.0;
  min_expected(mdp, h.values, h.anchor, out.h.values, argmin);
  for (auto& x : out.h.values) x -= lambda;
  out.lambda = lambda + gamma * out.h.at_anchor();
  return out;
}

SolveReport solve_white(const FiniteMdp& mdp, const WhiteOptions& opts, const ValueField* h0) {
  if (!(opts.tol > 0.0)) throw PreconditionError("solve_white: tol must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw PreconditionError("solve_white: damping must lie in (0, 1]");
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);

  ValueField h = h0 ? *h0 : zero_field(mdp.size(), mdp.anchor);
  require_length(mdp, h, "solve_white");
  h.anchor = mdp.anchor;
  h.stamp = 0.0;

  SolveReport report;
  double lambda_prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k <= opts.max_iters; ++k) {
    auto next = white_step(mdp, h);
    if (opts.damping != 1.0) {
      for (std::size_t i = 0; i < h.size(); ++i)
        next.h.values[i] = (1.0 - opts.damping) * h.values[i] + opts.damping * next.h.values[i];
    }
    const double change = sup_distance(next.h.values, h.values);
    const double dlambda = std::abs(next.lambda - lambda_prev);
    const double spn = span(next.h);
    report.steps = k;

    const bool diverged = !finite_values(next.h.values) || !std::isfinite(next.lambda) || spn > opts.blowup;
    const bool converged = !diverged && change <= opts.tol && dlambda <= opts.tol;
    if (k % every == 0 || converged || diverged || k == opts.max_iters)
      report.records.push_back({static_cast<double>(k), next.lambda, spn, change, change / opts.damping});

    h = std::move(next.h);
    lambda_prev = next.lambda;
    if (diverged) {
      report.status = SolveStatus::diverged;
      break;
    }
    if (converged) {
      report.status = SolveStatus::converged;
      break;
    }
  }
  report.terminal_value = std::move(h);
  report.terminal_beta = lambda_prev;
  return report;
}

SolveReport solve_bertsekas(const FiniteMdp& mdp, const BertsekasOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("solve_bertsekas: tol must be positive");
  if (!(opts.gamma0 > 0.0 && opts.gamma0 <= 1.0)) throw PreconditionError("solve_bertsekas: gamma0 must lie in (0, 1]");
  const std::size_t every = std::max<std::size_t>(1, opts.record_every);

  ValueField h = zero_field(mdp.size(), mdp.anchor);
  double lambda = 0.0;
  SolveReport report;
  for (std::size_t k = 0; k < opts.max_iters; ++k) {
    const double gamma =
        opts.schedule == StepsizeSchedule::constant ? opts.gamma0 : opts.gamma0 / (1.0 + static_cast<double>(k));
    auto next = bertsekas_step(mdp, h, lambda, gamma);
    const double change = sup_distance(next.h.values, h.values);
    const double dlambda = std::abs(next.lambda - lambda);
    const double spn = span(next.h);
    report.steps = k + 1;

    const bool diverged = !finite_values(next.h.values) || !std::isfinite(next.lambda) || spn > opts.blowup;
    const bool converged = !diverged && change <= opts.tol && dlambda <= opts.tol;
    if ((k + 1) % every == 0 || converged || diverged || k + 1 == opts.max_iters)
      report.records.push_back(
          {static_cast<double>(k + 1), next.lambda, spn, change, poisson_residual(mdp, next.h, next.lambda)});

    h = std::move(next.h);
    lambda = next.lambda;
    if (diverged) {
      report.status = SolveStatus::diverged;
      break;
    }
    if (converged) {
      report.status = SolveStatus::converged;
      break;
    }
  }
  report.terminal_value = std::move(h);
  report.terminal_beta = lambda;
  return report;
}

std::vector<double> stationary_distribution(const DenseMatrix& P) {
  auto A = detail::to_eigen(P);
  A -= Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const auto pi = detail::stationary_from_generator(A, {});
  return {pi.data(), pi.data() + pi.size()};
}

DenseMatrix policy_matrix(const ControlledChain& chain, const PolicySelection& policy) {
  DenseMatrix m(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) m[i] = chain.states[i].at(policy.actions.at(i)).row;
  return m;
}

std::vector<double> policy_cost(const ControlledChain& chain, const PolicySelection& policy) {
  std::vector<double> r(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) r[i] = chain.states[i].at(policy.actions.at(i)).cost;
  return r;
}

ErgodicSolution exact_ergodic(const FiniteMdp& mdp) {
  const auto opt = detail::solve_chain_exactly(mdp, /*continuous_time=*/false);
  ErgodicSolution out;
  out.value = ValueField{opt.value, mdp.anchor, 0.0};
  out.beta = opt.beta;
  out.policy.actions = opt.policy;
  out.residual = poisson_residual(mdp, out.value, out.beta);
  return out;
}

}  // namespace ergodic
