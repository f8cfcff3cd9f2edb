#include "ergodic/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include "strings.hpp"

namespace ergodic {

std::size_t ControlledChain::policy_count() const noexcept {
  std::size_t count = 1;
  for (const auto& s : states) {
    const std::size_t m = s.size();
    if (m == 0) return 0;
    if (count > std::numeric_limits<std::size_t>::max() / m) return std::numeric_limits<std::size_t>::max();
    count *= m;
  }
  return count;
}

namespace {

template <typename Chain>
Chain make_chain(std::vector<StateActions> states, std::optional<std::size_t> anchor) {
  Chain chain;
  chain.anchor = anchor.value_or(states.empty() ? 0 : states.size() - 1);
  chain.states = std::move(states);
  return chain;
}

// Iterative DFS reachability from `root`, forward or reverse.
std::vector<bool> reachable(const std::vector<std::vector<std::size_t>>& adj, std::size_t root) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (auto j : adj[i]) {
      if (!seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

bool strongly_connected(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> rev(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : adj[i]) rev[j].push_back(i);
  const auto fwd = reachable(adj, 0);
  const auto bwd = reachable(rev, 0);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

bool policy_graph_irreducible(const ControlledChain& chain, const std::vector<std::size_t>& policy) {
  const std::size_t n = chain.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = chain.states[i][policy[i]].row;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && row[j] > 0.0) adj[i].push_back(j);
  }
  return strongly_connected(adj);
}

// Shape checks shared by both chain kinds. Returns false if the rows cannot be
// inspected further (wrong lengths, no actions).
bool check_shape(const ControlledChain& chain, ValidationReport& report) {
  bool usable = true;
  const std::size_t n = chain.size();
  if (n == 0) {
    report.violations.push_back({"model has no states", {}, {}, {}});
    return false;
  }
  if (chain.anchor >= n) {
    report.violations.push_back({"anchor " + std::to_string(chain.anchor) + " out of range", {}, {}, {}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& acts = chain.states[i];
    if (acts.empty()) {
      report.violations.push_back({"state " + std::to_string(i) + " has no actions", i, {}, {}});
      usable = false;
    }
    for (std::size_t a = 0; a < acts.size(); ++a) {
      if (acts[a].row.size() != n) {
        report.violations.push_back({"row length " + std::to_string(acts[a].row.size()) + " != " +
                                         std::to_string(n) + " at (state " + std::to_string(i) +
                                         ", action " + acts[a].label + ")",
                                     i, a, {}});
        usable = false;
      }
      if (!std::isfinite(acts[a].cost)) {
        report.violations.push_back({"non-finite cost at (state " + std::to_string(i) + ", action " +
                                         acts[a].label + ")",
                                     i, a, {}});
      }
    }
  }
  return usable;
}

}  // namespace

FiniteMdp make_mdp(std::vector<StateActions> states, std::optional<std::size_t> anchor) {
  return make_chain<FiniteMdp>(std::move(states), anchor);
}

CtmcModel make_ctmc(std::vector<StateActions> states, std::optional<std::size_t> anchor) {
  return make_chain<CtmcModel>(std::move(states), anchor);
}

bool lower_bound_graph_irreducible(const ControlledChain& chain) {
  const std::size_t n = chain.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& act : chain.states[i]) lo = std::min(lo, act.row[j]);
      if (lo > 0.0) adj[i].push_back(j);
    }
  }
  return strongly_connected(adj);
}

ValidationReport validate(const FiniteMdp& mdp) {
  ValidationReport report;
  if (!check_shape(mdp, report)) return report;
  const std::size_t n = mdp.size();
  bool rows_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < mdp.states[i].size(); ++a) {
      const auto& act = mdp.states[i][a];
      const std::string where = "(state " + std::to_string(i) + ", action " + act.label + ")";
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p = act.row[j];
        if (!std::isfinite(p) || p < 0.0) {
          report.violations.push_back({"negative or non-finite probability " + format_real(p) + " at " + where +
                                           " column " + std::to_string(j),
                                       i, a, {}});
          rows_ok = false;
        }
        sum += p;
      }
      if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
        report.violations.push_back({"row sum " + format_real(sum) + " ≠ 1 at " + where, i, a, {}});
        rows_ok = false;
      }
    }
  }
  if (!rows_ok) return report;

  if (!lower_bound_graph_irreducible(mdp)) {
    const std::size_t count = mdp.policy_count();
    if (count <= 1'000'000) {
      std::vector<std::size_t> policy(n, 0);
      for (std::size_t k = 0; k < count; ++k) {
        if (!policy_graph_irreducible(mdp, policy)) {
          std::ostringstream msg;
          msg << "policy (";
          for (std::size_t i = 0; i < n; ++i) msg << (i ? "," : "") << mdp.states[i][policy[i]].label;
          msg << ") induces a reducible chain";
          report.violations.push_back({msg.str(), {}, {}, {}});
          break;
        }
        for (std::size_t i = 0; i < n; ++i) {
          if (++policy[i] < mdp.states[i].size()) break;
          policy[i] = 0;
        }
      }
    } else {
      report.violations.push_back(
          {"uniform lower-bound transition graph is not irreducible and the policy count is too large to "
           "certify every policy",
           {}, {}, {}});
    }
  }
  return report;
}

ValidationReport validate(const CtmcModel& model) {
  ValidationReport report;
  if (!check_shape(model, report)) return report;
  const std::size_t n = model.size();
  bool rows_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < model.states[i].size(); ++a) {
      const auto& act = model.states[i][a];
      const std::string where = "(state " + std::to_string(i) + ", action " + act.label + ")";
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double q = act.row[j];
        if (!std::isfinite(q) || (j != i && q < 0.0)) {
          report.violations.push_back({"negative or non-finite off-diagonal rate " + format_real(q) + " at " +
                                           where + " column " + std::to_string(j),
                                       i, a, {}});
          rows_ok = false;
        }
        sum += q;
      }
      if (!(std::abs(sum) <= kRowSumTolerance)) {
        report.violations.push_back({"rate row sum " + format_real(sum) + " ≠ 0 at " + where, i, a, {}});
        rows_ok = false;
      }
    }
  }
  if (rows_ok && !lower_bound_graph_irreducible(model)) {
    report.violations.push_back(
        {"uniform lower-bound rate graph (edge i->j iff min_u q_ij(u) > 0) is not irreducible", {}, {}, {}});
  }
  return report;
}

ValidationReport validate(const DiffusionProblem& p) {
  ValidationReport report;
  const std::size_t n = p.nodes();
  const std::size_t m = p.action_count();
  auto add = [&](std::string msg, std::optional<std::size_t> action, std::optional<std::size_t> node) {
    report.violations.push_back({std::move(msg), {}, action, node});
  };

  if (!(p.half_width > 0.0) || !(p.dx > 0.0) || !(p.dx <= p.half_width)) {
    add("grid requires L > 0 and 0 < dx <= L", {}, {});
    return report;
  }
  if (n < 3) {
    add("grid needs at least 3 nodes", {}, {});
    return report;
  }
  if (m == 0) {
    add("action grid is empty", {}, {});
    return report;
  }
  if (p.sigma.size() != n || p.diffusivity.size() != n || p.drift.size() != m || p.cost.size() != m) {
    add("coefficient tables do not match grid/action sizes", {}, {});
    return report;
  }
  for (std::size_t u = 0; u < m; ++u) {
    if (p.drift[u].size() != n || p.cost[u].size() != n) {
      add("coefficient row for action " + std::to_string(u) + " has wrong length", u, {});
      return report;
    }
  }
  if (p.anchor >= n) {
    add("anchor index out of range", {}, {});
  } else if (std::abs(p.grid[p.anchor]) > 0.5 * p.dx + 1e-12) {
    add("anchor node x=" + format_real(p.grid[p.anchor]) + " is farther than dx/2 from 0", {}, p.anchor);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double a = p.diffusivity[i];
    if (!std::isfinite(a) || !(a > 0.0)) {
      add("diffusivity a(x)=" + format_real(a) + " is not positive at x=" + format_real(p.grid[i]), {}, i);
    }
    for (std::size_t u = 0; u < m; ++u) {
      if (!std::isfinite(p.drift[u][i])) add("non-finite drift at x=" + format_real(p.grid[i]), u, i);
      const double r = p.cost[u][i];
      if (!std::isfinite(r) || r < 0.0) add("running cost " + format_real(r) + " < 0 at x=" + format_real(p.grid[i]), u, i);
    }
  }

  if (p.lyapunov) {
    const auto& ly = *p.lyapunov;
    if (ly.values.size() != n) {
      add("Lyapunov table has wrong length", {}, {});
      return report;
    }
    if (!(ly.c0 > 0.0) || !(ly.c1 > 0.0) || !(ly.c2 > 0.0)) add("Lyapunov constants must be positive", {}, {});
    for (std::size_t i = 0; i < n; ++i) {
      if (!(ly.values[i] >= 1.0)) add("Lyapunov value < 1 at x=" + format_real(p.grid[i]), {}, i);
      double rmax = 0.0;
      for (std::size_t u = 0; u < m; ++u) rmax = std::max(rmax, p.cost[u][i]);
      if (rmax > ly.c2 * ly.values[i]) {
        add("sup_u r = " + format_real(rmax) + " exceeds c2*V = " + format_real(ly.c2 * ly.values[i]) +
                " at x=" + format_real(p.grid[i]),
            {}, i);
      }
    }
  }
  return report;
}

std::string_view to_string(DriftScheme s) noexcept {
  switch (s) {
    case DriftScheme::upwind: return "upwind";
    case DriftScheme::central_where_monotone: return "central_where_monotone";
  }
  return "?";
}

std::string_view to_string(BoundaryKind b) noexcept {
  switch (b) {
    case BoundaryKind::reflecting: return "reflecting";
    case BoundaryKind::dirichlet: return "dirichlet";
  }
  return "?";
}

std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_steps: return "max_steps";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

ValueField zero_field(std::size_t n, std::size_t anchor) { return ValueField{std::vector<double>(n, 0.0), anchor, 0.0}; }

ValueField shifted(const ValueField& v, double c) {
  ValueField out = v;
  for (auto& x : out.values) x += c;
  return out;
}

ValueField anchored(const ValueField& v) { return shifted(v, -v.at_anchor()); }

double span(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double sup_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw PreconditionError("sup_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace ergodic
