#include "run_config.hpp"

#include <fstream>
#include <sstream>

#include "ergodic/generator.hpp"
#include "json.hpp"

namespace ergodic::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& base, const std::string& key) { return base + "." + key; }

void only_keys(const json& obj, const std::string& base, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(base, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ConfigError(base.empty() ? it.key() : join(base, it.key()), "unknown field");
  }
}

class Section {
 public:
  Section(const json& doc, const char* name) : name_(name) {
    auto it = doc.find(name);
    if (it != doc.end() && !it->is_null()) {
      if (!it->is_object()) throw ConfigError(name, "expected an object");
      obj_ = *it;
    }
  }

  void only(std::initializer_list<const char*> allowed) const { only_keys(obj_, name_, allowed); }
  bool has(const char* key) const { return obj_.contains(key) && !obj_[key].is_null(); }

  double real(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_number()) throw ConfigError(join(name_, key), "expected a number");
    return obj_[key].get<double>();
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_[key];
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    throw ConfigError(join(name_, key), "expected a nonnegative integer");
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_boolean()) throw ConfigError(join(name_, key), "expected true or false");
    return obj_[key].get<bool>();
  }

  std::string text(const char* key, std::string fallback) const {
    if (!has(key)) return fallback;
    if (!obj_[key].is_string()) throw ConfigError(join(name_, key), "expected a string");
    return obj_[key].get<std::string>();
  }

  [[noreturn]] void fail(const char* key, const std::string& message) const {
    throw ConfigError(join(name_, key), message);
  }

 private:
  std::string name_;
  json obj_ = json::object();
};

Algorithm parse_algorithm(const std::string& s) {
  if (s == "white") return Algorithm::white;
  if (s == "bertsekas") return Algorithm::bertsekas;
  if (s == "ctmc-rvi") return Algorithm::ctmc_rvi;
  if (s == "ctmc-vi") return Algorithm::ctmc_vi;
  if (s == "pde-rvi") return Algorithm::pde_rvi;
  if (s == "pde-vi") return Algorithm::pde_vi;
  if (s == "oracle") return Algorithm::oracle;
  throw ConfigError("algorithm", "unknown algorithm '" + s + "'");
}

bool compatible(Algorithm a, ProblemKind k) {
  switch (a) {
    case Algorithm::white:
    case Algorithm::bertsekas: return k == ProblemKind::mdp;
    case Algorithm::ctmc_rvi:
    case Algorithm::ctmc_vi: return k == ProblemKind::ctmc;
    case Algorithm::pde_rvi:
    case Algorithm::pde_vi: return k == ProblemKind::diffusion;
    case Algorithm::oracle: return true;
  }
  return false;
}

Algorithm default_algorithm(ProblemKind k) {
  switch (k) {
    case ProblemKind::mdp: return Algorithm::white;
    case ProblemKind::ctmc: return Algorithm::ctmc_rvi;
    case ProblemKind::diffusion: return Algorithm::pde_rvi;
  }
  return Algorithm::oracle;
}

void require_positive(const Section& s, const char* key, double v) {
  if (!(v > 0.0)) s.fail(key, "must be positive");
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::white: return "white";
    case Algorithm::bertsekas: return "bertsekas";
    case Algorithm::ctmc_rvi: return "ctmc-rvi";
    case Algorithm::ctmc_vi: return "ctmc-vi";
    case Algorithm::pde_rvi: return "pde-rvi";
    case Algorithm::pde_vi: return "pde-vi";
    case Algorithm::oracle: return "oracle";
  }
  return "?";
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  cfg.problem = parse_problem(text);
  const json doc = json::parse(text.begin(), text.end());
  only_keys(doc, "", {"kind", "model", "anchor", "algorithm", "options", "compare", "output"});

  const auto kind = cfg.problem.kind;
  if (doc.contains("algorithm")) {
    if (!doc["algorithm"].is_string()) throw ConfigError("algorithm", "expected a string");
    cfg.algorithm = parse_algorithm(doc["algorithm"].get<std::string>());
  } else {
    cfg.algorithm = default_algorithm(kind);
  }
  if (!compatible(cfg.algorithm, kind))
    throw ConfigError("algorithm", std::string(to_string(cfg.algorithm)) + " does not apply to a " +
                                       std::string(to_string(kind)) + " problem");

  json echo = json::parse(cfg.problem.resolved);
  echo["algorithm"] = std::string(to_string(cfg.algorithm));

  const Section opt(doc, "options");
  const Section cmp(doc, "compare");
  const Section out(doc, "output");
  auto& o = cfg.options;
  auto& c = cfg.compare;
  json eo = json::object();

  switch (kind) {
    case ProblemKind::mdp: {
      opt.only({"tol", "max_iters", "damping", "gamma", "schedule", "record_every", "blowup"});
      o.tol = opt.real("tol", 1e-10);
      o.max_iters = opt.count("max_iters", 100000);
      o.damping = opt.real("damping", 1.0);
      o.gamma = opt.real("gamma", 0.5);
      const auto sched = opt.text("schedule", "constant");
      if (sched == "harmonic")
        o.schedule = StepsizeSchedule::harmonic;
      else if (sched != "constant")
        opt.fail("schedule", "expected \"constant\" or \"harmonic\"");
      o.record_every = opt.count("record_every", 1);
      o.blowup = opt.real("blowup", 1e12);
      require_positive(opt, "tol", o.tol);
      if (!(o.damping > 0.0 && o.damping <= 1.0)) opt.fail("damping", "must lie in (0, 1]");
      if (!(o.gamma > 0.0 && o.gamma <= 1.0)) opt.fail("gamma", "must lie in (0, 1]");
      eo = {{"tol", o.tol},       {"max_iters", o.max_iters},       {"damping", o.damping}, {"gamma", o.gamma},
            {"schedule", sched}, {"record_every", o.record_every}, {"blowup", o.blowup}};
      c.beta_tol = 1e-8;
      c.value_tol = 1e-7;
      break;
    }
    case ProblemKind::ctmc: {
      opt.only({"tol", "dt", "T", "method", "record_every", "blowup", "beta"});
      o.tol = opt.real("tol", 1e-8);
      o.dt = opt.real("dt", 0.01);
      o.T = opt.real("T", 50.0);
      const auto method = opt.text("method", "rk4");
      if (method == "euler")
        o.method = OdeMethod::euler;
      else if (method != "rk4")
        opt.fail("method", "expected \"rk4\" or \"euler\"");
      o.record_every = opt.count("record_every", 1);
      o.blowup = opt.real("blowup", 1e12);
      if (opt.has("beta")) o.beta = opt.real("beta", 0.0);
      require_positive(opt, "tol", o.tol);
      require_positive(opt, "dt", o.dt);
      require_positive(opt, "T", o.T);
      eo = {{"tol", o.tol},       {"dt", o.dt}, {"T", o.T}, {"method", method}, {"record_every", o.record_every},
            {"blowup", o.blowup}};
      if (o.beta) eo["beta"] = *o.beta;
      c.beta_tol = 1e-6;
      c.value_tol = 1e-5;
      break;
    }
    case ProblemKind::diffusion: {
      const auto& p = std::get<DiffusionProblem>(cfg.problem.model);
      opt.only({"tol", "dt", "T", "record_every", "core_margin", "blowup", "beta"});
      o.tol = opt.real("tol", 0.0);
      o.T = opt.real("T", 20.0);
      o.record_every = opt.count("record_every", 100);
      o.core_margin = opt.real("core_margin", default_core_margin(p));
      o.blowup = opt.real("blowup", 1e12);
      if (opt.has("beta")) o.beta = opt.real("beta", 0.0);
      if (!(o.tol >= 0.0)) opt.fail("tol", "must be nonnegative");
      require_positive(opt, "T", o.T);
      if (!(o.core_margin >= 0.0 && o.core_margin < p.half_width)) opt.fail("core_margin", "must lie in [0, L)");
      const double limit = cfl_max_dt(p);
      o.dt = opt.real("dt", limit);
      require_positive(opt, "dt", o.dt);
      if (o.dt > limit * (1.0 + 1e-12)) opt.fail("dt", "exceeds the CFL bound");
      eo = {{"tol", o.tol},
            {"dt", o.dt},
            {"T", o.T},
            {"record_every", o.record_every},
            {"core_margin", o.core_margin},
            {"blowup", o.blowup}};
      if (o.beta) eo["beta"] = *o.beta;
      c.beta_tol = 0.02;
      c.value_tol = 0.05;
      c.relative = true;
      break;
    }
  }
  if (o.record_every == 0) opt.fail("record_every", "must be at least 1");
  if (o.max_iters == 0) opt.fail("max_iters", "must be at least 1");
  require_positive(opt, "blowup", o.blowup);
  echo["options"] = eo;

  cmp.only({"beta_tol", "value_tol", "relative", "bound_slack", "identity_tol", "oracle"});
  c.beta_tol = cmp.real("beta_tol", c.beta_tol);
  c.value_tol = cmp.real("value_tol", c.value_tol);
  c.relative = cmp.flag("relative", c.relative);
  c.bound_slack = cmp.real("bound_slack", c.bound_slack);
  c.identity_tol = cmp.real("identity_tol", c.identity_tol);
  const auto oracle = cmp.text("oracle", "auto");
  if (oracle == "closed_form")
    c.oracle = OracleKind::closed_form;
  else if (oracle == "discrete")
    c.oracle = OracleKind::discrete;
  else if (oracle != "auto")
    cmp.fail("oracle", "expected \"auto\", \"closed_form\" or \"discrete\"");
  require_positive(cmp, "beta_tol", c.beta_tol);
  require_positive(cmp, "value_tol", c.value_tol);
  require_positive(cmp, "bound_slack", c.bound_slack);
  require_positive(cmp, "identity_tol", c.identity_tol);
  echo["compare"] = {{"beta_tol", c.beta_tol},       {"value_tol", c.value_tol},       {"relative", c.relative},
                     {"bound_slack", c.bound_slack}, {"identity_tol", c.identity_tol}, {"oracle", oracle}};

  out.only({"dir", "field_csv"});
  cfg.out_dir = out.text("dir", ".");
  cfg.field_csv = out.flag("field_csv", true);
  echo["output"] = {{"dir", cfg.out_dir.string()}, {"field_csv", cfg.field_csv}};

  cfg.resolved = echo.dump();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace ergodic::cli
