#include "linalg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ergodic::detail {

namespace {

std::string describe(const std::vector<std::size_t>& policy) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < policy.size(); ++i) os << (i ? "," : "") << policy[i];
  os << ")";
  return os.str();
}

Eigen::MatrixXd policy_generator(const ControlledChain& chain, const std::vector<std::size_t>& policy,
                                 bool continuous_time) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = chain.states[i][policy[i]].row;
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = row[j];
    if (!continuous_time) A(i, i) -= 1.0;
  }
  return A;
}

Eigen::VectorXd policy_costs(const ControlledChain& chain, const std::vector<std::size_t>& policy) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) r(i) = chain.states[i][policy[i]].cost;
  return r;
}

// One round of policy improvement: returns true if any state switched.
bool improve(const ControlledChain& chain, const Eigen::VectorXd& v, std::vector<std::size_t>& policy) {
  const std::size_t n = chain.size();
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    auto q = [&](std::size_t a) {
      const auto& act = chain.states[i][a];
      double s = act.cost;
      for (std::size_t j = 0; j < n; ++j) s += act.row[j] * v(static_cast<Eigen::Index>(j));
      return s;
    };
    const double current = q(policy[i]);
    std::size_t best = policy[i];
    double best_val = current;
    for (std::size_t a = 0; a < chain.states[i].size(); ++a) {
      const double val = q(a);
      if (val < best_val - 1e-13 * scale) {
        best_val = val;
        best = a;
      }
    }
    if (best != policy[i]) {
      policy[i] = best;
      changed = true;
    }
  }
  return changed;
}

}  // namespace

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m[i].size() != m.size()) throw PreconditionError("matrix is not square");
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = m[i][j];
  }
  return out;
}

Eigen::VectorXd stationary_from_generator(const Eigen::MatrixXd& A, const std::vector<std::size_t>& policy) {
  const auto n = A.rows();
  Eigen::MatrixXd M = A.transpose();
  M.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) throw ReducibleChainError("stationary law is not unique for policy " + describe(policy), policy);
  Eigen::VectorXd pi = lu.solve(rhs);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(pi(i) > 1e-14))
      throw ReducibleChainError("policy " + describe(policy) + " has a transient state " + std::to_string(i), policy);
  }
  return pi / pi.sum();
}

PoissonSolution solve_poisson(const Eigen::MatrixXd& A, const Eigen::VectorXd& r, std::size_t anchor,
                              const std::vector<std::size_t>& policy) {
  // Unknowns: V with the anchor slot reused for beta. -A V + beta 1 = r.
  const auto n = A.rows();
  const auto k = static_cast<Eigen::Index>(anchor);
  Eigen::MatrixXd M = -A;
  M.col(k).setOnes();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) throw ReducibleChainError("Poisson system is singular for policy " + describe(policy), policy);
  Eigen::VectorXd z = lu.solve(r);
  PoissonSolution out;
  out.beta = z(k);
  out.value = z;
  out.value(k) = 0.0;
  return out;
}

ChainOptimum solve_chain_exactly(const ControlledChain& chain, bool continuous_time) {
  const std::size_t n = chain.size();
  const std::size_t count = chain.policy_count();
  std::vector<std::size_t> best_policy(n, 0);

  if (count <= 1'000'000) {
    std::vector<std::size_t> policy(n, 0);
    double best_beta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
      const auto A = policy_generator(chain, policy, continuous_time);
      const auto pi = stationary_from_generator(A, policy);
      const double beta = pi.dot(policy_costs(chain, policy));
      if (beta < best_beta) {
        best_beta = beta;
        best_policy = policy;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (++policy[i] < chain.states[i].size()) break;
        policy[i] = 0;
      }
    }
  }

  // Howard iteration: drives the search above 10^6 policies and certifies the
  // enumeration winner otherwise (no switch happens when it is optimal).
  PoissonSolution sol;
  for (std::size_t round = 0; round < 10'000; ++round) {
    const auto A = policy_generator(chain, best_policy, continuous_time);
    sol = solve_poisson(A, policy_costs(chain, best_policy), chain.anchor, best_policy);
    if (!improve(chain, sol.value, best_policy)) break;
  }

  ChainOptimum out;
  out.value.assign(sol.value.data(), sol.value.data() + sol.value.size());
  out.beta = sol.beta;
  out.policy = best_policy;
  return out;
}

}  // namespace ergodic::detail
