#pragma once

#include <cstddef>
#include <vector>

#include "ergodic/model.hpp"

namespace ergodic {

/// Row-major dense square matrix.
using DenseMatrix = std::vector<std::vector<double>>;

/// Minimizing action index per state. Ties go to the lowest index.
struct PolicySelection {
  std::vector<std::size_t> actions;
  bool operator==(const PolicySelection&) const = default;
};

/// (V, beta) with V(anchor) = 0, plus the minimizing selector and the sup-norm
/// residual of the optimality equation it was checked against.
struct ErgodicSolution {
  ValueField value;
  double beta = 0.0;
  PolicySelection policy;
  double residual = 0.0;
};

struct BellmanResult {
  ValueField value;
  PolicySelection policy;
};

/// F(V)(i) = min_u [ r(i,u) + sum_j p_ij(u) V(j) ], no beta subtracted.
BellmanResult bellman_min(const FiniteMdp& mdp, const ValueField& v);

/// sup_i | F(v)(i) - beta - v(i) |.
double poisson_residual(const FiniteMdp& mdp, const ValueField& v, double beta);

struct RviStep {
  ValueField h;
  double lambda = 0.0;
};

/// White's relative value iteration: lambda' = F(h)(anchor), h' = F(h) - lambda'.
RviStep white_step(const FiniteMdp& mdp, const ValueField& h);

/// Bertsekas' variant, literally as displayed:
///   h'(i)   = min_u [ r(i,u) + sum_{j != anchor} p_ij(u) h(j) ] - lambda
///   lambda' = lambda + gamma * h'(anchor)
/// Requires gamma in (0, 1].
RviStep bertsekas_step(const FiniteMdp& mdp, const ValueField& h, double lambda, double gamma);

struct WhiteOptions {
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  double damping = 1.0;  ///< h <- (1 - damping) h + damping * step(h)
  double blowup = 1e12;  ///< span(h) above this reports `diverged`
  std::size_t record_every = 1;
};

/// Iterates white_step from h0 (zero when omitted). Converged iff both the
/// sup change in h and the change in lambda are <= tol. The recorded
/// hjb_residual is the residual of the pre-step iterate against the new
/// lambda, i.e. sup|step(h) - h|.
SolveReport solve_white(const FiniteMdp& mdp, const WhiteOptions& opts = {}, const ValueField* h0 = nullptr);

enum class StepsizeSchedule { constant, harmonic };  // gamma_k = gamma0 or gamma0 / (1 + k)

struct BertsekasOptions {
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  double gamma0 = 0.5;
  StepsizeSchedule schedule = StepsizeSchedule::constant;
  double blowup = 1e12;
  std::size_t record_every = 1;
};

SolveReport solve_bertsekas(const FiniteMdp& mdp, const BertsekasOptions& opts = {});

/// Stationary law of an irreducible stochastic matrix: pi >= 0, sum = 1, pi P = pi.
/// Throws ReducibleChainError when the law is not unique or not positive.
std::vector<double> stationary_distribution(const DenseMatrix& P);

/// Transition matrix and cost vector of a deterministic stationary policy.
DenseMatrix policy_matrix(const ControlledChain& chain, const PolicySelection& policy);
std::vector<double> policy_cost(const ControlledChain& chain, const PolicySelection& policy);

/// Exact oracle. Enumerates all deterministic stationary policies (Howard
/// policy iteration above 10^6 policies), takes the minimal stationary average
/// cost, then solves the Poisson system with V(anchor) = 0.
ErgodicSolution exact_ergodic(const FiniteMdp& mdp);

}  // namespace ergodic
