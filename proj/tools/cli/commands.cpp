#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "ergodic/diagnostics.hpp"
#include "ergodic/generator.hpp"
#include "ergodic/parabolic.hpp"
#include "ergodic/report_io.hpp"
#include "json.hpp"
#include "run_config.hpp"

namespace ergodic::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Console and label text; CSV/JSON artifacts keep full precision.
std::string human(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Oracle {
  double beta = 0.0;
  std::vector<double> value;  // zero at the anchor
  std::string source;
};

struct SolverRun {
  SolveReport report;
  std::optional<ParabolicRun> parabolic;
  std::vector<std::string> policy;
};

ValidationReport validate_all(const LoadedProblem& lp) {
  return std::visit(
      [](const auto& m) {
        auto report = validate(m);
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DiffusionProblem>) {
          if (report.ok() && m.lyapunov) {
            const auto ly = verify_lyapunov(m);
            if (!ly.drift_ok)
              report.violations.push_back({"Lyapunov drift condition fails at x=" + human(ly.worst_drift_x) +
                                               ", u=" + human(ly.worst_drift_u) +
                                               " (margin " + human(ly.worst_drift_margin) + ")",
                                           {}, {}, {}});
          }
        }
        return report;
      },
      lp.model);
}

int print_violations(const LoadedProblem& lp, const ValidationReport& report, std::ostream& err) {
  for (const auto& v : report.violations) {
    const auto path = violation_path(lp, v);
    err << (path.empty() ? "" : path + ": ") << v.message << '\n';
  }
  err << report.violations.size() << " violation(s)\n";
  return kValidationFailure;
}

std::vector<std::string> chain_labels(const ControlledChain& chain, const PolicySelection& policy) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < policy.actions.size(); ++i) out.push_back(chain.action(i, policy.actions[i]).label);
  return out;
}

std::vector<std::string> action_values(const DiffusionProblem& p, const PolicySelection& policy) {
  std::vector<std::string> out;
  for (auto a : policy.actions) out.push_back(human(p.actions[a]));
  return out;
}

Oracle diffusion_oracle(const RunConfig& cfg, const DiffusionProblem& p) {
  const bool closed = cfg.compare.oracle == OracleKind::closed_form ||
                      (cfg.compare.oracle == OracleKind::automatic && p.name == "lq");
  Oracle o;
  if (closed) {
    if (p.name != "lq") throw ConfigError("compare.oracle", "no closed form for problem '" + p.name + "'");
    double u_max = 0.0;
    for (double u : p.actions) u_max = std::max(u_max, std::abs(u));
    const auto sol = lq_exact(u_max, p.half_width - cfg.options.core_margin);
    o.beta = sol.beta;
    const double base = sol.value(p.grid[p.anchor]);
    for (double x : p.grid) o.value.push_back(sol.value(x) - base);
    o.source = "closed_form";
    return o;
  }
  if (p.boundary != BoundaryKind::reflecting)
    throw ReducibleChainError("the discrete oracle needs a reflecting boundary", {});
  const auto sol = exact_ctmc(to_ctmc(p));
  o.beta = sol.beta;
  o.value = sol.value.values;
  o.source = "discrete";
  return o;
}

Oracle chain_oracle(const LoadedProblem& lp) {
  const auto sol =
      lp.kind == ProblemKind::mdp ? exact_ergodic(std::get<FiniteMdp>(lp.model)) : exact_ctmc(std::get<CtmcModel>(lp.model));
  return {sol.beta, sol.value.values, "exact"};
}

Oracle oracle_for(const RunConfig& cfg) {
  if (cfg.problem.kind == ProblemKind::diffusion)
    return diffusion_oracle(cfg, std::get<DiffusionProblem>(cfg.problem.model));
  return chain_oracle(cfg.problem);
}

ParabolicOptions parabolic_options(const SolverOptions& o) {
  ParabolicOptions po;
  po.T = o.T;
  po.dt = o.dt;
  po.record_every = o.record_every;
  po.tol = o.tol;
  po.core_margin = o.core_margin;
  po.blowup = o.blowup;
  return po;
}

ParabolicResult run_parabolic(const DiffusionProblem& p, const SolverOptions& o, const ParabolicMode& mode) {
  return solve_parabolic(p, zero_field(p.nodes(), p.anchor), mode, parabolic_options(o));
}

SolverRun run_solver(const RunConfig& cfg) {
  const auto& o = cfg.options;
  SolverRun run;
  switch (cfg.algorithm) {
    case Algorithm::white: {
      const auto& mdp = std::get<FiniteMdp>(cfg.problem.model);
      WhiteOptions wo;
      wo.tol = o.tol;
      wo.max_iters = o.max_iters;
      wo.damping = o.damping;
      wo.blowup = o.blowup;
      wo.record_every = o.record_every;
      run.report = solve_white(mdp, wo);
      run.policy = chain_labels(mdp, bellman_min(mdp, run.report.terminal_value).policy);
      break;
    }
    case Algorithm::bertsekas: {
      const auto& mdp = std::get<FiniteMdp>(cfg.problem.model);
      BertsekasOptions bo;
      bo.tol = o.tol;
      bo.max_iters = o.max_iters;
      bo.gamma0 = o.gamma;
      bo.schedule = o.schedule;
      bo.blowup = o.blowup;
      bo.record_every = o.record_every;
      run.report = solve_bertsekas(mdp, bo);
      run.policy = chain_labels(mdp, bellman_min(mdp, run.report.terminal_value).policy);
      break;
    }
    case Algorithm::ctmc_rvi:
    case Algorithm::ctmc_vi: {
      const auto& model = std::get<CtmcModel>(cfg.problem.model);
      OdeOptions oo;
      oo.dt = o.dt;
      oo.T = o.T;
      oo.method = o.method;
      oo.record_every = o.record_every;
      oo.blowup = o.blowup;
      const bool vi = cfg.algorithm == Algorithm::ctmc_vi;
      const double beta = vi ? o.beta.value_or(exact_ctmc(model).beta) : 0.0;
      run.report = solve_ctmc(model, vi ? CtmcFlow::vi : CtmcFlow::rvi, oo, o.tol, beta);
      run.policy = chain_labels(model, ctmc_min(model, run.report.terminal_value).policy);
      break;
    }
    case Algorithm::pde_rvi:
    case Algorithm::pde_vi: {
      const auto& p = std::get<DiffusionProblem>(cfg.problem.model);
      const bool vi = cfg.algorithm == Algorithm::pde_vi;
      const auto mode = vi ? ParabolicMode::vi(o.beta ? *o.beta : diffusion_oracle(cfg, p).beta) : ParabolicMode::rvi();
      auto result = run_parabolic(p, o, mode);
      run.report = std::move(result.report);
      run.policy = action_values(p, result.run.final_policy);
      run.parabolic = std::move(result.run);
      break;
    }
    case Algorithm::oracle: {
      const auto oracle = oracle_for(cfg);
      ValueField v{oracle.value, 0, 0.0};
      double residual = 0.0;
      if (cfg.problem.kind == ProblemKind::mdp) {
        const auto& mdp = std::get<FiniteMdp>(cfg.problem.model);
        v.anchor = mdp.anchor;
        residual = poisson_residual(mdp, v, oracle.beta);
        run.policy = chain_labels(mdp, bellman_min(mdp, v).policy);
      } else if (cfg.problem.kind == ProblemKind::ctmc) {
        const auto& model = std::get<CtmcModel>(cfg.problem.model);
        v.anchor = model.anchor;
        residual = ctmc_hjb_residual(model, v, oracle.beta);
        run.policy = chain_labels(model, ctmc_min(model, v).policy);
      } else {
        const auto& p = std::get<DiffusionProblem>(cfg.problem.model);
        v.anchor = p.anchor;
        residual = hjb_residual(p, v, oracle.beta, o.core_margin);
        run.policy = action_values(p, rhs_min(p, v).policy);
      }
      run.report.records.push_back({0.0, oracle.beta, span(v), 0.0, residual});
      run.report.terminal_value = v;
      run.report.terminal_beta = oracle.beta;
      run.report.status = SolveStatus::converged;
      break;
    }
  }
  return run;
}

fs::path resolve_out_dir(const RunConfig& cfg, const std::optional<fs::path>& flag) {
  fs::path dir = flag ? *flag : cfg.out_dir;
  fs::create_directories(dir);
  return dir;
}

void write_artifacts(const RunConfig& cfg, const SolverRun& run, const fs::path& dir) {
  {
    std::ofstream trace(dir / "trace.csv");
    write_trace_csv(trace, run.report);
  }
  if (run.parabolic && cfg.field_csv) {
    std::ofstream field(dir / "field.csv");
    write_field_csv(field, *run.parabolic, std::get<DiffusionProblem>(cfg.problem.model));
  }
  const auto& rec = run.report.records.back();
  json summary = {
      {"config", json::parse(cfg.resolved)},
      {"status", std::string(to_string(run.report.status))},
      {"steps", run.report.steps},
      {"terminal_beta", run.report.terminal_beta},
      {"terminal_residual", rec.hjb_residual},
      {"terminal_span", rec.span},
      {"policy", run.policy},
  };
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
}

// Loads, validates and solves; on success `cfg` and `run` are filled in.
int load_and_solve(const fs::path& config, const std::optional<fs::path>& out_dir, RunConfig& cfg, SolverRun& run,
                   fs::path& dir, std::ostream& out, std::ostream& err) {
  cfg = load_run_config(config);
  const auto report = validate_all(cfg.problem);
  if (!report.ok()) return print_violations(cfg.problem, report, err);
  run = run_solver(cfg);
  dir = resolve_out_dir(cfg, out_dir);
  write_artifacts(cfg, run, dir);
  out << "status " << to_string(run.report.status) << " beta " << human(run.report.terminal_beta)
      << " residual " << human(run.report.records.back().hjb_residual) << " steps " << run.report.steps << '\n';
  if (run.report.status == SolveStatus::diverged) {
    err << "solver diverged; partial trace written to " << (dir / "trace.csv").string() << '\n';
    return kDiverged;
  }
  return kOk;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ReducibleChainError& e) {
    err << "oracle infeasible: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

double sup_over(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (auto i : idx) s = std::max(s, std::abs(v[i]));
  return s;
}

}  // namespace

int cmd_validate(const fs::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(config);
    if (!in) throw ConfigError("", "cannot open config file '" + config.string() + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto lp = parse_problem(text);
    const auto report = validate_all(lp);
    if (!report.ok()) return print_violations(lp, report, err);
    parse_run_config(text);  // option errors surface as config errors
    out << "ok: " << to_string(lp.kind) << " problem is valid\n";
    return static_cast<int>(kOk);
  });
}

int cmd_solve(const fs::path& config, const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg;
    SolverRun run;
    fs::path dir;
    return load_and_solve(config, out_dir, cfg, run, dir, out, err);
  });
}

int cmd_compare(const fs::path& config, const std::optional<fs::path>& out_dir, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_run_config(config);
    if (cfg.algorithm == Algorithm::oracle)
      throw ConfigError("algorithm", "compare needs an iterative algorithm, not the oracle");
    SolverRun run;
    fs::path dir;
    if (const int code = load_and_solve(config, out_dir, cfg, run, dir, out, err); code != kOk) return code;

    const auto oracle = oracle_for(cfg);
    const auto& c = cfg.compare;
    const auto& v = run.report.terminal_value;

    std::vector<std::size_t> idx;
    if (cfg.problem.kind == ProblemKind::diffusion)
      idx = core_nodes(std::get<DiffusionProblem>(cfg.problem.model), cfg.options.core_margin);
    else
      for (std::size_t i = 0; i < v.size(); ++i) idx.push_back(i);

    std::vector<double> diff(v.size(), 0.0);
    const double base = v.at_anchor();
    for (auto i : idx) diff[i] = (v[i] - base) - oracle.value[i];
    double value_error = sup_over(diff, idx);
    double beta_error = std::abs(run.report.terminal_beta - oracle.beta);
    if (c.relative) {
      const double scale = sup_over(oracle.value, idx);
      if (scale > 0.0) value_error /= scale;
      if (oracle.beta != 0.0) beta_error /= std::abs(oracle.beta);
    }

    json report = {
        {"oracle", oracle.source},
        {"beta_estimate", run.report.terminal_beta},
        {"beta_oracle", oracle.beta},
        {"beta_error", beta_error},
        {"beta_tol", c.beta_tol},
        {"value_error", value_error},
        {"value_tol", c.value_tol},
        {"relative", c.relative},
    };
    std::vector<std::string> failures;
    if (!(beta_error <= c.beta_tol)) failures.push_back("beta");
    if (!(value_error <= c.value_tol)) failures.push_back("value");
    out << "beta error " << human(beta_error) << " (tol " << human(c.beta_tol) << ")\n";
    out << "value error " << human(value_error) << " (tol " << human(c.value_tol) << ")\n";

    if (run.parabolic) {
      const auto& p = std::get<DiffusionProblem>(cfg.problem.model);
      const bool is_vi = run.parabolic->mode == ParabolicMode::Kind::vi;
      const double vi_beta = is_vi ? run.parabolic->beta : oracle.beta;
      auto companion = run_parabolic(p, cfg.options, is_vi ? ParabolicMode::rvi() : ParabolicMode::vi(vi_beta)).run;
      const ParabolicRun& rvi_run = is_vi ? companion : *run.parabolic;
      const ParabolicRun& vi_run = is_vi ? *run.parabolic : companion;

      if (p.boundary == BoundaryKind::reflecting && cfg.options.tol == 0.0) {
        const auto id = check_vv_identity(rvi_run, vi_run, vi_beta);
        const bool ok = id.exact_residual <= c.identity_tol;
        report["vv_identity"] = {{"exact_residual", id.exact_residual},
                                 {"continuum_residual", id.continuum_residual},
                                 {"tol", c.identity_tol},
                                 {"passed", ok}};
        if (!ok) failures.push_back("vv_identity");
        out << "rvi/vi identity residual " << human(id.exact_residual) << '\n';
      } else {
        report["vv_identity"] = {{"skipped", p.boundary == BoundaryKind::reflecting
                                                 ? "runs stop early under a tolerance"
                                                 : "identity needs a reflecting boundary"}};
      }
      if (p.lyapunov) {
        ValueField vstar{oracle.value, p.anchor, 0.0};
        const auto b = check_bound(vstar, vi_run, p, cfg.options.core_margin, c.bound_slack);
        report["bound"] = {{"samples", b.samples},
                           {"violations", b.violations},
                           {"worst_ratio", b.worst_ratio},
                           {"initial_gap", b.initial_gap},
                           {"passed", b.passed()}};
        if (!b.passed()) failures.push_back("bound");
        out << "bound worst ratio " << human(b.worst_ratio) << " over " << b.samples << " samples\n";
      }
    }

    const bool pass = failures.empty();
    report["failures"] = failures;
    report["pass"] = pass;
    std::ofstream(dir / "compare.json") << report.dump(2) << '\n';
    out << (pass ? "PASS" : "FAIL") << '\n';
    return static_cast<int>(pass ? kOk : kComparisonFailure);
  });
}

}  // namespace ergodic::cli
