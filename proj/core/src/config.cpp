#include "ergodic/config.hpp"

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>

#include "ergodic/problems.hpp"
#include "json.hpp"

namespace ergodic {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& base, const std::string& key) {
  if (!obj.is_object()) throw ConfigError(base, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(base, key), "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

void only_keys(const json& obj, const std::string& base, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(base, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw ConfigError(join(base, it.key()), "unknown field");
  }
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

std::size_t as_index(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
  throw ConfigError(path, "expected a nonnegative integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_reals(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], index(path, i)));
  return out;
}

std::vector<std::vector<double>> as_table(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_reals(v[i], index(path, i)));
  return out;
}

// Reads builtin parameters and keeps the resolved values (defaults
// included) for the audit echo.
class Params {
 public:
  Params(const json& in, std::string base) : in_(in), base_(std::move(base)), echo_(json::object()) {}

  void only(std::initializer_list<const char*> allowed) const { only_keys(in_, base_, allowed); }

  double real(const char* key, double fallback) {
    const json* v = optional_field(in_, key);
    const double out = v ? as_real(*v, join(base_, key)) : fallback;
    echo_[key] = out;
    return out;
  }

  std::size_t count(const char* key, std::size_t fallback) {
    const json* v = optional_field(in_, key);
    const std::size_t out = v ? as_index(*v, join(base_, key)) : fallback;
    echo_[key] = out;
    return out;
  }

  const std::string& path() const noexcept { return base_; }
  const json& echo() const noexcept { return echo_; }

 private:
  const json& in_;
  std::string base_;
  json echo_;
};

// Builders throw PreconditionError on bad arguments; report those against
// the params object.
template <typename F>
auto guarded(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const PreconditionError& e) {
    throw ConfigError(path, e.what());
  }
}

std::vector<StateActions> parse_states(const json& model, const std::string& base) {
  only_keys(model, base, {"states"});
  const std::string spath = join(base, "states");
  const json& states = require(model, base, "states");
  if (!states.is_array() || states.empty()) throw ConfigError(spath, "expected a nonempty array");
  std::vector<StateActions> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string sp = index(spath, i);
    only_keys(states[i], sp, {"actions"});
    const json& acts = require(states[i], sp, "actions");
    const std::string ap = join(sp, "actions");
    if (!acts.is_array()) throw ConfigError(ap, "expected an array");
    StateActions sa;
    for (std::size_t a = 0; a < acts.size(); ++a) {
      const std::string p = index(ap, a);
      only_keys(acts[a], p, {"label", "row", "cost"});
      ActionRow row;
      const json* label = optional_field(acts[a], "label");
      row.label = label ? as_string(*label, join(p, "label")) : std::to_string(a);
      row.row = as_reals(require(acts[a], p, "row"), join(p, "row"));
      row.cost = as_real(require(acts[a], p, "cost"), join(p, "cost"));
      sa.push_back(std::move(row));
    }
    out.push_back(std::move(sa));
  }
  return out;
}

DriftScheme parse_scheme(const json& v, const std::string& path) {
  const auto s = as_string(v, path);
  if (s == "upwind") return DriftScheme::upwind;
  if (s == "central_where_monotone") return DriftScheme::central_where_monotone;
  throw ConfigError(path, "expected \"upwind\" or \"central_where_monotone\"");
}

BoundaryKind parse_boundary(const json& v, const std::string& path) {
  const auto s = as_string(v, path);
  if (s == "reflecting") return BoundaryKind::reflecting;
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  throw ConfigError(path, "expected \"reflecting\" or \"dirichlet\"");
}

[[noreturn]] void unknown_problem(const std::string& path, const std::string& name) {
  throw ConfigError(path, "unknown problem '" + name + "'");
}

FiniteMdp builtin_mdp(const std::string& name, Params& p) {
  if (name == "e1") {
    p.only({});
    return example_mdp();
  }
  if (name == "two_cycle") {
    p.only({});
    return two_cycle_mdp();
  }
  if (name == "random") {
    p.only({"seed", "states", "actions", "sparsity"});
    const auto seed = p.count("seed", 0);
    const auto n = p.count("states", 4);
    const auto m = p.count("actions", 3);
    const auto sparsity = p.real("sparsity", 0.3);
    return guarded(p.path(), [&] { return random_mdp(seed, n, m, sparsity); });
  }
  unknown_problem("model.builtin", name);
}

CtmcModel builtin_ctmc(const std::string& name, Params& p) {
  if (name == "c1") {
    p.only({});
    return example_ctmc();
  }
  if (name == "random") {
    p.only({"seed", "states", "actions", "sparsity"});
    const auto seed = p.count("seed", 0);
    const auto n = p.count("states", 4);
    const auto m = p.count("actions", 2);
    const auto sparsity = p.real("sparsity", 0.3);
    return guarded(p.path(), [&] { return random_ctmc(seed, n, m, sparsity); });
  }
  unknown_problem("model.builtin", name);
}

DiffusionProblem builtin_diffusion(const std::string& name, Params& p, DriftScheme scheme) {
  if (name == "lq") {
    p.only({"half_width", "dx", "u_max", "du"});
    const auto L = p.real("half_width", 5.0);
    const auto dx = p.real("dx", 0.05);
    const auto u_max = p.real("u_max", 3.0);
    const auto du = p.real("du", 0.1);
    return guarded(p.path(), [&] { return build_lq_benchmark(L, dx, u_max, du, scheme); });
  }
  if (name == "constant_cost") {
    p.only({"half_width", "dx", "cost"});
    const auto L = p.real("half_width", 2.0);
    const auto dx = p.real("dx", 0.05);
    const auto cost = p.real("cost", 1.0);
    return guarded(p.path(), [&] { return build_constant_cost_diffusion(L, dx, cost); });
  }
  if (name == "random_single_action") {
    p.only({"seed", "half_width", "dx"});
    const auto seed = p.count("seed", 0);
    const auto L = p.real("half_width", 2.0);
    const auto dx = p.real("dx", 0.05);
    return guarded(p.path(), [&] { return random_single_action_diffusion(seed, L, dx); });
  }
  unknown_problem("model.builtin", name);
}

DiffusionProblem inline_diffusion(const json& m, const std::string& base) {
  DiffusionProblem p;
  const json* name = optional_field(m, "name");
  p.name = name ? as_string(*name, join(base, "name")) : "custom";
  p.half_width = as_real(require(m, base, "half_width"), join(base, "half_width"));
  p.dx = as_real(require(m, base, "dx"), join(base, "dx"));
  p.grid = guarded(join(base, "dx"), [&] { return uniform_grid(p.half_width, p.dx); });
  p.anchor = nearest_to_zero(p.grid);
  p.actions = as_reals(require(m, base, "actions"), join(base, "actions"));
  p.drift = as_table(require(m, base, "drift"), join(base, "drift"));
  p.sigma = as_reals(require(m, base, "sigma"), join(base, "sigma"));
  p.diffusivity.resize(p.sigma.size());
  for (std::size_t i = 0; i < p.sigma.size(); ++i) p.diffusivity[i] = 0.5 * p.sigma[i] * p.sigma[i];
  p.cost = as_table(require(m, base, "cost"), join(base, "cost"));
  if (const json* ly = optional_field(m, "lyapunov")) {
    const std::string lp = join(base, "lyapunov");
    only_keys(*ly, lp, {"values", "c0", "c1", "c2"});
    LyapunovData d;
    d.values = as_reals(require(*ly, lp, "values"), join(lp, "values"));
    d.c0 = as_real(require(*ly, lp, "c0"), join(lp, "c0"));
    d.c1 = as_real(require(*ly, lp, "c1"), join(lp, "c1"));
    d.c2 = as_real(require(*ly, lp, "c2"), join(lp, "c2"));
    p.lyapunov = std::move(d);
  }
  return p;
}

}  // namespace

std::string_view to_string(ProblemKind k) noexcept {
  switch (k) {
    case ProblemKind::mdp: return "mdp";
    case ProblemKind::ctmc: return "ctmc";
    case ProblemKind::diffusion: return "diffusion";
  }
  return "?";
}

LoadedProblem parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "top level must be an object");

  LoadedProblem out;
  json echo = json::object();
  const auto kind = as_string(require(doc, "", "kind"), "kind");
  if (kind == "mdp")
    out.kind = ProblemKind::mdp;
  else if (kind == "ctmc")
    out.kind = ProblemKind::ctmc;
  else if (kind == "diffusion")
    out.kind = ProblemKind::diffusion;
  else
    throw ConfigError("kind", "expected \"mdp\", \"ctmc\" or \"diffusion\"");

  const json& model = require(doc, "", "model");
  if (!model.is_object()) throw ConfigError("model", "expected an object");
  const json* builtin = optional_field(model, "builtin");
  out.inline_model = builtin == nullptr;
  static const json empty = json::object();
  const json* params_in = optional_field(model, "params");
  Params params(params_in ? *params_in : empty, "model.params");
  echo["kind"] = kind;
  echo["model"] = model;

  if (out.kind == ProblemKind::diffusion) {
    const json* s = optional_field(model, "drift_scheme");
    const json* b = optional_field(model, "boundary");
    const auto scheme = s ? parse_scheme(*s, "model.drift_scheme") : DriftScheme::central_where_monotone;
    DiffusionProblem p;
    if (builtin) {
      only_keys(model, "model", {"builtin", "params", "drift_scheme", "boundary"});
      p = builtin_diffusion(as_string(*builtin, "model.builtin"), params, scheme);
      echo["model"]["params"] = params.echo();
    } else {
      only_keys(model, "model",
                {"name", "half_width", "dx", "actions", "drift", "sigma", "cost", "lyapunov", "drift_scheme", "boundary"});
      p = inline_diffusion(model, "model");
      p.drift_scheme = scheme;
    }
    if (b) p.boundary = parse_boundary(*b, "model.boundary");
    if (const json* a = optional_field(doc, "anchor")) {
      p.anchor = as_index(*a, "anchor");
      if (p.anchor >= p.nodes()) throw ConfigError("anchor", "index out of range");
    }
    echo["model"]["drift_scheme"] = std::string(to_string(p.drift_scheme));
    echo["model"]["boundary"] = std::string(to_string(p.boundary));
    echo["anchor"] = p.anchor;
    out.resolved = echo.dump();
    out.model = std::move(p);
    return out;
  }

  ControlledChain chain;
  if (builtin) {
    only_keys(model, "model", {"builtin", "params"});
    const auto name = as_string(*builtin, "model.builtin");
    if (out.kind == ProblemKind::mdp)
      chain = builtin_mdp(name, params);
    else
      chain = builtin_ctmc(name, params);
    echo["model"]["params"] = params.echo();
  } else {
    chain.states = parse_states(model, "model");
    chain.anchor = chain.states.size() - 1;
  }
  if (const json* a = optional_field(doc, "anchor")) {
    chain.anchor = as_index(*a, "anchor");
    if (chain.anchor >= chain.size()) throw ConfigError("anchor", "index out of range");
  }
  echo["anchor"] = chain.anchor;
  out.resolved = echo.dump();
  if (out.kind == ProblemKind::mdp)
    out.model = FiniteMdp{std::move(chain)};
  else
    out.model = CtmcModel{std::move(chain)};
  return out;
}

std::string violation_path(const LoadedProblem& problem, const Violation& v) {
  if (problem.kind != ProblemKind::diffusion) {
    if (!v.state) return "";
    std::string p = index("model.states", *v.state);
    if (!v.action) return p;
    p = index(join(p, "actions"), *v.action);
    if (!problem.inline_model) return p;
    return join(p, v.message.find("cost") != std::string::npos ? "cost" : "row");
  }
  if (!v.node) return v.action ? index("model.actions", *v.action) : "";
  const auto& m = v.message;
  if (m.find("Lyapunov") != std::string::npos) return index("model.lyapunov.values", *v.node);
  if (m.find("diffusivity") != std::string::npos) return index("model.sigma", *v.node);
  if (m.find("anchor") != std::string::npos) return "anchor";
  if (v.action) {
    const char* table = m.find("drift") != std::string::npos ? "model.drift" : "model.cost";
    return index(index(table, *v.action), *v.node);
  }
  return index("model.grid", *v.node);
}

}  // namespace ergodic
