#include "ergodic/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ergodic/diagnostics.hpp"
#include "strings.hpp"

namespace ergodic {

std::vector<double> uniform_grid(double half_width, double dx) {
  if (!(half_width > 0.0) || !(dx > 0.0) || !(dx <= half_width))
    throw PreconditionError("uniform_grid: need L > 0 and 0 < dx <= L");
  const double cells = 2.0 * half_width / dx;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
    throw PreconditionError("uniform_grid: 2L/dx = " + format_real(cells) + " is not an integer");
  const auto m = static_cast<std::size_t>(rounded);
  std::vector<double> grid(m + 1);
  for (std::size_t i = 0; i <= m; ++i) grid[i] = -half_width + static_cast<double>(i) * dx;
  grid.back() = half_width;
  // Snap the midpoint so the anchor sits exactly on 0 for even cell counts.
  if (m % 2 == 0) grid[m / 2] = 0.0;
  return grid;
}

std::vector<double> action_grid(double u_max, double du) {
  if (!(u_max > 0.0) || !(du > 0.0) || !(du <= u_max))
    throw PreconditionError("action_grid: need u_max > 0 and 0 < du <= u_max");
  const auto count = static_cast<std::size_t>(std::floor(2.0 * u_max / du + 1e-9)) + 1;
  std::vector<double> actions(count);
  for (std::size_t j = 0; j < count; ++j) actions[j] = -u_max + static_cast<double>(j) * du;
  if (std::abs(actions.back() - u_max) < 1e-9 * u_max) actions.back() = u_max;
  for (auto& u : actions)
    if (std::abs(u) < 1e-12 * u_max) u = 0.0;
  return actions;
}

std::size_t nearest_to_zero(std::span<const double> grid) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i]) < std::abs(grid[best])) best = i;
  return best;
}

DiffusionProblem tabulate(std::string name, double half_width, double dx, std::vector<double> actions,
                          const DiffusionCoefficients& c, DriftScheme scheme, BoundaryKind boundary) {
  DiffusionProblem p;
  p.name = std::move(name);
  p.half_width = half_width;
  p.dx = dx;
  p.grid = uniform_grid(half_width, dx);
  p.anchor = nearest_to_zero(p.grid);
  p.actions = std::move(actions);
  p.drift_scheme = scheme;
  p.boundary = boundary;

  const std::size_t n = p.grid.size();
  p.sigma.resize(n);
  p.diffusivity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.sigma[i] = c.sigma(p.grid[i]);
    p.diffusivity[i] = 0.5 * p.sigma[i] * p.sigma[i];
  }
  p.drift.assign(p.actions.size(), std::vector<double>(n));
  p.cost.assign(p.actions.size(), std::vector<double>(n));
  for (std::size_t u = 0; u < p.actions.size(); ++u) {
    for (std::size_t i = 0; i < n; ++i) {
      p.drift[u][i] = c.drift(p.grid[i], p.actions[u]);
      p.cost[u][i] = c.cost(p.grid[i], p.actions[u]);
    }
  }
  return p;
}

DiffusionProblem build_lq_benchmark(double half_width, double dx, double u_max, double du, DriftScheme scheme) {
  if (!(half_width > 0.0) || !(dx > 0.0) || !(dx <= half_width) || !(u_max > 0.0) || !(du > 0.0) || !(du <= u_max))
    throw PreconditionError("build_lq_benchmark: need L > 0, 0 < dx <= L, u_max > 0, 0 < du <= u_max");

  DiffusionCoefficients c{
      [](double x, double u) { return u - x; },
      [](double) { return std::numbers::sqrt2; },
      [](double x, double u) { return x * x + u * u; },
  };
  auto p = tabulate("lq", half_width, dx, action_grid(u_max, du), c, scheme);
  // sigma^2/2 is 1.0000000000000002 in floating point; the model says a = 1.
  std::fill(p.diffusivity.begin(), p.diffusivity.end(), 1.0);

  LyapunovData ly;
  ly.values.resize(p.nodes());
  for (std::size_t i = 0; i < p.nodes(); ++i) ly.values[i] = 1.0 + p.grid[i] * p.grid[i];
  ly.c1 = 1.0;
  ly.c0 = 1.0;
  ly.c2 = 1.0;
  p.lyapunov = ly;

  // Smallest integer constants that the sweep certifies.
  const auto sweep = lyapunov_requirements(p);
  p.lyapunov->c0 = std::max(1.0, std::ceil(sweep.required_c0 - 1e-9));
  p.lyapunov->c2 = std::max(1.0, std::ceil(sweep.required_c2 - 1e-9));

  const auto check = verify_lyapunov(p);
  if (!check.passed)
    throw PreconditionError("build_lq_benchmark: no (c0, c1) certifies the drift condition on this grid");
  return p;
}

DiffusionProblem build_constant_cost_diffusion(double half_width, double dx, double cost) {
  DiffusionCoefficients c{
      [](double, double) { return 0.0; },
      [](double) { return std::numbers::sqrt2; },
      [cost](double, double) { return cost; },
  };
  auto p = tabulate("constant_cost", half_width, dx, {0.0}, c);
  std::fill(p.diffusivity.begin(), p.diffusivity.end(), 1.0);
  return p;
}

DiffusionProblem random_single_action_diffusion(std::uint64_t seed, double half_width, double dx) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta = 0.5 + 1.5 * unit(rng);
  const double wiggle = 0.5 * unit(rng);
  const double freq = 1.0 + 2.0 * unit(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double a0 = 0.3 + 0.5 * unit(rng);
  const double a1 = 0.5 * unit(rng);
  const double r0 = 2.0 * unit(rng);
  const double r1 = 1.0 + unit(rng);
  const double r2 = unit(rng);

  DiffusionCoefficients c{
      [=](double x, double) { return -theta * x + wiggle * std::sin(freq * x + phase); },
      [=](double x) { return std::sqrt(2.0 * (a0 + a1 * std::cos(freq * x) * std::cos(freq * x))); },
      [=](double x, double) { return r0 + r1 * x * x + r2 * (1.0 + std::sin(2.0 * x + phase)); },
  };
  return tabulate("random_single_action", half_width, dx, {0.0}, c);
}

FiniteMdp example_mdp() {
  std::vector<StateActions> states{
      {{"a", {0.5, 0.5}, 1.0}, {"b", {0.9, 0.1}, 2.0}},
      {{"a", {0.5, 0.5}, 0.0}},
  };
  return make_mdp(std::move(states));
}

FiniteMdp two_cycle_mdp() {
  std::vector<StateActions> states{
      {{"a", {0.0, 1.0}, 1.0}},
      {{"a", {1.0, 0.0}, 0.0}},
  };
  return make_mdp(std::move(states));
}

namespace {

// Positive weights on the self-loop and the cycle edge i -> i+1; other
// entries are zeroed with probability `sparsity`.
std::vector<double> random_weights(std::mt19937_64& rng, std::size_t i, std::size_t n, double sparsity,
                                   double lo, double hi, bool self_loop) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const bool forced = (j == (i + 1) % n) || (self_loop && j == i);
    const double draw = lo + (hi - lo) * unit(rng);
    const double keep = unit(rng);
    if (!self_loop && j == i) continue;
    if (forced || keep >= sparsity) w[j] = draw;
  }
  return w;
}

}  // namespace

FiniteMdp random_mdp(std::uint64_t seed, std::size_t n, std::size_t m, double sparsity) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::vector<StateActions> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      auto w = random_weights(rng, i, n, sparsity, 0.05, 1.0, true);
      double total = 0.0;
      for (double x : w) total += x;
      for (auto& x : w) x /= total;
      states[i].push_back({"u" + std::to_string(a), std::move(w), cost(rng)});
    }
  }
  return make_mdp(std::move(states));
}

CtmcModel example_ctmc() {
  std::vector<StateActions> states{
      {{"a", {-1.0, 1.0}, 1.0}},
      {{"a", {2.0, -2.0}, 0.0}},
  };
  return make_ctmc(std::move(states));
}

CtmcModel random_ctmc(std::uint64_t seed, std::size_t n, std::size_t m, double sparsity) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::vector<StateActions> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      auto q = n > 1 ? random_weights(rng, i, n, sparsity, 0.2, 2.0, false) : std::vector<double>(1, 0.0);
      double out = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) out += q[j];
      q[i] = -out;
      states[i].push_back({"u" + std::to_string(a), std::move(q), cost(rng)});
    }
  }
  return make_ctmc(std::move(states));
}

}  // namespace ergodic
