#include "ergodic/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strings.hpp"

namespace ergodic {

namespace {

constexpr std::ptrdiff_t kParallelNodes = 2048;

}  // namespace

double GeneratorStencil::apply(std::span<const double> phi, std::size_t i) const {
  const std::size_t n = size();
  double s = 0.0;
  if (i > 0) s += lower[i] * (phi[i - 1] - phi[i]);
  if (i + 1 < n) s += upper[i] * (phi[i + 1] - phi[i]);
  return s;
}

GeneratorStencil discretize_generator(const DiffusionProblem& p, std::size_t action) {
  const std::size_t n = p.nodes();
  const double dx = p.dx;
  const double inv_dx2 = 1.0 / (dx * dx);
  GeneratorStencil st;
  st.lower.assign(n, 0.0);
  st.diag.assign(n, 0.0);
  st.upper.assign(n, 0.0);

  const auto& b = p.drift.at(action);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p.diffusivity[i];
    double lo = a * inv_dx2;
    double up = a * inv_dx2;
    const double bi = b[i];
    const bool central = p.drift_scheme == DriftScheme::central_where_monotone && std::abs(bi) * dx <= 2.0 * a;
    if (central) {
      up += bi / (2.0 * dx);
      lo -= bi / (2.0 * dx);
    } else {
      up += std::max(bi, 0.0) / dx;
      lo += std::max(-bi, 0.0) / dx;
    }
    st.lower[i] = lo;
    st.upper[i] = up;
  }

  // End rows.
  if (p.boundary == BoundaryKind::reflecting) {
    // Ghost node mirrors the interior neighbour: phi_{-1} = phi_1, phi_{n} = phi_{n-2}.
    st.upper[0] += st.lower[0];
    st.lower[0] = 0.0;
    st.lower[n - 1] += st.upper[n - 1];
    st.upper[n - 1] = 0.0;
  } else {
    st.lower[0] = st.upper[0] = 0.0;
    st.lower[n - 1] = st.upper[n - 1] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) st.diag[i] = -(st.lower[i] + st.upper[i]);
  return st;
}

ControlledGenerator::ControlledGenerator(const DiffusionProblem& p)
    : nodes_(p.nodes()), actions_(p.action_count()) {
  stencils_.reserve(actions_);
  cost_.resize(actions_ * nodes_);
  for (std::size_t u = 0; u < actions_; ++u) {
    stencils_.push_back(discretize_generator(p, u));
    for (double d : stencils_.back().diag) max_rate_ = std::max(max_rate_, std::abs(d));
    std::copy(p.cost[u].begin(), p.cost[u].end(), cost_.begin() + static_cast<std::ptrdiff_t>(u * nodes_));
  }
}

void ControlledGenerator::minimize(std::span<const double> v, std::span<double> out,
                                   std::span<std::size_t> policy) const {
  const std::size_t n = nodes_;
  const bool want_policy = !policy.empty();
  // Increments toward each neighbour; zero at the ends where the stencil
  // coefficient vanishes anyway.
  std::vector<double> dm(n, 0.0), dp(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) dm[i] = v[i - 1] - v[i];
  for (std::size_t i = 0; i + 1 < n; ++i) dp[i] = v[i + 1] - v[i];

  std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
  if (want_policy) std::fill(policy.begin(), policy.end(), 0);

  const auto nn = static_cast<std::ptrdiff_t>(n);
  for (std::size_t u = 0; u < actions_; ++u) {
    const double* lo = stencils_[u].lower.data();
    const double* up = stencils_[u].upper.data();
    const double* r = cost_.data() + u * n;
    if (want_policy) {
#pragma omp parallel for if (nn >= kParallelNodes) schedule(static)
      for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const double val = r[i] + lo[i] * dm[i] + up[i] * dp[i];
        if (val < out[i]) {
          out[i] = val;
          policy[i] = u;
        }
      }
    } else {
#pragma omp parallel for if (nn >= kParallelNodes) schedule(static)
      for (std::ptrdiff_t i = 0; i < nn; ++i) {
        const double val = r[i] + lo[i] * dm[i] + up[i] * dp[i];
        out[i] = std::min(out[i], val);
      }
    }
  }
}

RhsMinResult rhs_min(const DiffusionProblem& problem, const ValueField& v) {
  if (v.size() != problem.nodes()) throw PreconditionError("rhs_min: field length does not match the grid");
  const ControlledGenerator gen(problem);
  RhsMinResult out;
  out.values.resize(v.size());
  out.policy.actions.resize(v.size());
  gen.minimize(v.values, out.values, out.policy.actions);
  return out;
}

double cfl_max_dt(const DiffusionProblem& p) {
  double rate = 0.0;
  for (std::size_t i = 0; i < p.nodes(); ++i) {
    const double diff = 2.0 * p.diffusivity[i] / (p.dx * p.dx);
    for (std::size_t u = 0; u < p.action_count(); ++u)
      rate = std::max(rate, diff + std::abs(p.drift[u][i]) / p.dx);
  }
  if (!(rate > 0.0)) throw PreconditionError("cfl_max_dt: generator has no positive rates");
  return 1.0 / rate;
}

std::vector<std::size_t> core_nodes(const DiffusionProblem& p, double margin) {
  std::vector<std::size_t> idx;
  const double limit = p.half_width - margin + 1e-9 * p.dx;
  for (std::size_t i = 0; i < p.nodes(); ++i) {
    if (p.boundary == BoundaryKind::dirichlet && (i == 0 || i + 1 == p.nodes())) continue;
    if (std::abs(p.grid[i]) <= limit) idx.push_back(i);
  }
  return idx;
}

double hjb_residual(const DiffusionProblem& problem, const ValueField& v, double beta, double core_margin) {
  const auto m = rhs_min(problem, v);
  double res = 0.0;
  for (auto i : core_nodes(problem, core_margin)) res = std::max(res, std::abs(m.values[i] - beta));
  return res;
}

double coefficient_scale(const DiffusionProblem& p, double core_margin) {
  double s = 0.0;
  for (auto i : core_nodes(p, core_margin))
    for (std::size_t u = 0; u < p.action_count(); ++u) s = std::max(s, p.diffusivity[i] + std::abs(p.drift[u][i]));
  return s;
}

CtmcModel to_ctmc(const DiffusionProblem& problem) {
  const std::size_t n = problem.nodes();
  std::vector<StateActions> states(n);
  for (std::size_t a = 0; a < problem.action_count(); ++a) {
    const auto st = discretize_generator(problem, a);
    const auto label = format_real(problem.actions[a]);
    for (std::size_t i = 0; i < n; ++i) {
      ActionRow row{label, std::vector<double>(n, 0.0), problem.cost[a][i]};
      if (i > 0) row.row[i - 1] = st.lower[i];
      if (i + 1 < n) row.row[i + 1] = st.upper[i];
      row.row[i] = st.diag[i];
      states[i].push_back(std::move(row));
    }
  }
  return make_ctmc(std::move(states), problem.anchor);
}

}  // namespace ergodic
