#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ergodic/model.hpp"

namespace ergodic {

using DriftFn = std::function<double(double x, double u)>;
using SigmaFn = std::function<double(double x)>;
using CostFn = std::function<double(double x, double u)>;

/// Nodes -L, -L + dx, ..., L. Throws PreconditionError unless 2L/dx is an
/// integer (to 1e-9 relative) and 0 < dx <= L.
std::vector<double> uniform_grid(double half_width, double dx);

/// Actions -u_max, -u_max + du, ... up to u_max.
std::vector<double> action_grid(double u_max, double du);

/// Index of the node closest to the origin (lowest index on ties).
std::size_t nearest_to_zero(std::span<const double> grid) noexcept;

struct DiffusionCoefficients {
  DriftFn drift;
  SigmaFn sigma;
  CostFn cost;
};

/// Evaluates the coefficient functions on the grid x the action list.
DiffusionProblem tabulate(std::string name, double half_width, double dx, std::vector<double> actions,
                          const DiffusionCoefficients& coefficients,
                          DriftScheme scheme = DriftScheme::central_where_monotone,
                          BoundaryKind boundary = BoundaryKind::reflecting);

/// Linear-quadratic benchmark: b(x,u) = u - x, sigma = sqrt(2), r = x^2 + u^2,
/// Lyapunov function 1 + x^2. The constants (c0, c1, c2) are the smallest
/// integers (with c1 = 1) that the grid sweep certifies.
DiffusionProblem build_lq_benchmark(double half_width, double dx, double u_max, double du,
                                    DriftScheme scheme = DriftScheme::central_where_monotone);

/// Single action, zero drift, sigma = sqrt(2), constant running cost.
DiffusionProblem build_constant_cost_diffusion(double half_width, double dx, double cost);

/// Single-action diffusion with smooth random coefficients (mean-reverting
/// drift, a(x) in [0.3, 1.3], nonnegative cost).
DiffusionProblem random_single_action_diffusion(std::uint64_t seed, double half_width = 2.0, double dx = 0.05);

/// Two states; state 0 has actions a (r=1, p=(.5,.5)) and b (r=2, p=(.9,.1)),
/// state 1 a single action (r=0, p=(.5,.5)). Anchor = state 1.
FiniteMdp example_mdp();

/// Deterministic period-2 chain with costs (1, 0).
FiniteMdp two_cycle_mdp();

/// Random MDP whose transition graph contains a Hamiltonian cycle and
/// self-loops under every action (irreducible and aperiodic for every policy).
/// Costs uniform in [0, 10].
FiniteMdp random_mdp(std::uint64_t seed, std::size_t states, std::size_t actions, double sparsity = 0.3);

/// Two states, single action, Q = [[-1, 1], [2, -2]], r = (1, 0), anchor = state 1.
CtmcModel example_ctmc();

/// Random CTMC with off-diagonal rates in [0.2, 2] on a graph that always
/// contains a cycle through every state.
CtmcModel random_ctmc(std::uint64_t seed, std::size_t states, std::size_t actions, double sparsity = 0.3);

}  // namespace ergodic
