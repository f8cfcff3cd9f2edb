#pragma once

// Dense solves behind the oracles. Eigen stays out of the public headers.

#include <Eigen/Dense>
#include <vector>

#include "ergodic/discrete_rvi.hpp"

namespace ergodic::detail {

/// Generator-like matrix of a policy: P - I for a stochastic matrix, Q for a
/// rate matrix. Every row sums to zero.
Eigen::MatrixXd to_eigen(const DenseMatrix& m);

/// Unique probability vector with pi A = 0. Throws ReducibleChainError when the
/// solution is not unique or has a non-positive entry.
Eigen::VectorXd stationary_from_generator(const Eigen::MatrixXd& A, const std::vector<std::size_t>& policy);

struct PoissonSolution {
  Eigen::VectorXd value;
  double beta = 0.0;
};

/// Solves A V + r = beta 1 with V(anchor) = 0 (A as above).
PoissonSolution solve_poisson(const Eigen::MatrixXd& A, const Eigen::VectorXd& r, std::size_t anchor,
                              const std::vector<std::size_t>& policy);

/// Optimal (V, beta, policy) for a controlled chain given the generator-like
/// matrix of each policy. Shared by the MDP and CTMC oracles.
struct ChainOptimum {
  std::vector<double> value;
  double beta = 0.0;
  std::vector<std::size_t> policy;
};

ChainOptimum solve_chain_exactly(const ControlledChain& chain, bool continuous_time);

}  // namespace ergodic::detail
