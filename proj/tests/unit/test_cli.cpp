#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ergodic::cli;

namespace {

const fs::path kConfigs = ERGODIC_CONFIG_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("ergodic_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, ValidateGoldenConfigs) {
  for (const char* f : {"mdp_e1.json", "ctmc_c1.json", "diffusion_lq.json"}) {
    EXPECT_EQ(cmd_validate(kConfigs / f, out_, err_), kOk) << f << err_.str();
  }
}

TEST_F(Cli, ValidateRowSumViolation) {
  const auto cfg = write("bad.json", R"({"kind": "mdp", "model": {"states": [
      {"actions": [{"label": "a", "row": [0.5, 0.6], "cost": 1}]},
      {"actions": [{"label": "a", "row": [0.5, 0.5], "cost": 0}]}]}})");
  EXPECT_EQ(cmd_validate(cfg, out_, err_), kValidationFailure);
  EXPECT_NE(err_.str().find("model.states[0].actions[0].row"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("row sum 1.1"), std::string::npos);
}

TEST_F(Cli, ValidateUnknownBuiltin) {
  const auto cfg = write("unk.json", R"({"kind": "ctmc", "model": {"builtin": "c9"}})");
  EXPECT_EQ(cmd_validate(cfg, out_, err_), kConfigError);
  EXPECT_NE(err_.str().find("unknown problem"), std::string::npos);
}

TEST_F(Cli, ValidateMissingFile) { EXPECT_EQ(cmd_validate(dir_ / "absent.json", out_, err_), kConfigError); }

TEST_F(Cli, BadAlgorithmForKind) {
  const auto cfg = write("a.json", R"({"kind": "mdp", "model": {"builtin": "e1"}, "algorithm": "pde-rvi"})");
  EXPECT_EQ(cmd_solve(cfg, dir_, out_, err_), kConfigError);
}

TEST_F(Cli, NonPositiveOptionRejected) {
  const auto cfg = write("a.json", R"({"kind": "ctmc", "model": {"builtin": "c1"}, "options": {"dt": -1}})");
  EXPECT_EQ(cmd_solve(cfg, dir_, out_, err_), kConfigError);
  EXPECT_NE(err_.str().find("options.dt"), std::string::npos);
}

TEST_F(Cli, SolveE1White) {
  EXPECT_EQ(cmd_solve(kConfigs / "mdp_e1.json", dir_, out_, err_), kOk) << err_.str();
  const auto summary = load_json(dir_ / "summary.json");
  EXPECT_NEAR(summary["terminal_beta"].get<double>(), 0.5, 1e-8);
  EXPECT_EQ(summary["status"], "converged");
  EXPECT_EQ(summary["config"]["algorithm"], "white");
  EXPECT_EQ(summary["config"]["options"]["damping"], 1.0);
  const auto trace = slurp(dir_ / "trace.csv");
  EXPECT_EQ(trace.rfind("stamp,beta_estimate,span,sup_change,hjb_residual\n", 0), 0u);
}

TEST_F(Cli, SolveC1) {
  EXPECT_EQ(cmd_solve(kConfigs / "ctmc_c1.json", dir_, out_, err_), kOk) << err_.str();
  EXPECT_NEAR(load_json(dir_ / "summary.json")["terminal_beta"].get<double>(), 2.0 / 3.0, 1e-6);
}

TEST_F(Cli, SolveLqPde) {
  EXPECT_EQ(cmd_solve(kConfigs / "diffusion_lq.json", dir_, out_, err_), kOk) << err_.str();
  const double beta = load_json(dir_ / "summary.json")["terminal_beta"].get<double>();
  EXPECT_NEAR(beta, 0.828427, 0.02 * 0.828427);
  EXPECT_TRUE(fs::exists(dir_ / "field.csv"));
}

TEST_F(Cli, SolveIsByteIdentical) {
  const auto a = dir_ / "a";
  const auto b = dir_ / "b";
  ASSERT_EQ(cmd_solve(kConfigs / "ctmc_c1.json", a, out_, err_), kOk);
  ASSERT_EQ(cmd_solve(kConfigs / "ctmc_c1.json", b, out_, err_), kOk);
  for (const char* f : {"trace.csv", "summary.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(Cli, DivergenceKeepsPartialTrace) {
  const auto cfg = write("d.json", R"({"kind": "diffusion", "model": {"builtin": "lq", "params": {"dx": 0.5}},
      "algorithm": "pde-vi", "options": {"beta": 0, "T": 5, "blowup": 5, "record_every": 1}})");
  EXPECT_EQ(cmd_solve(cfg, dir_, out_, err_), kDiverged);
  EXPECT_TRUE(fs::exists(dir_ / "trace.csv"));
  EXPECT_EQ(load_json(dir_ / "summary.json")["status"], "diverged");
}

TEST_F(Cli, CompareE1Passes) {
  EXPECT_EQ(cmd_compare(kConfigs / "mdp_e1.json", dir_, out_, err_), kOk) << err_.str();
  const auto report = load_json(dir_ / "compare.json");
  EXPECT_TRUE(report["pass"].get<bool>());
  EXPECT_LE(report["beta_error"].get<double>(), 1e-8);
}

TEST_F(Cli, CompareLqPassesWithIdentityAndBound) {
  EXPECT_EQ(cmd_compare(kConfigs / "diffusion_lq.json", dir_, out_, err_), kOk) << err_.str() << out_.str();
  const auto report = load_json(dir_ / "compare.json");
  EXPECT_TRUE(report["vv_identity"]["passed"].get<bool>());
  EXPECT_TRUE(report["bound"]["passed"].get<bool>());
  EXPECT_LE(report["beta_error"].get<double>(), 0.02);
  EXPECT_LE(report["value_error"].get<double>(), 0.05);
}

TEST_F(Cli, CompareCoarseLqFailsWithMargins) {
  EXPECT_EQ(cmd_compare(kConfigs / "diffusion_lq_coarse.json", dir_, out_, err_), kComparisonFailure);
  const auto report = load_json(dir_ / "compare.json");
  EXPECT_FALSE(report["pass"].get<bool>());
  EXPECT_GT(report["beta_error"].get<double>(), 0.02);
}

TEST_F(Cli, CompareDiscreteOracleForCustomDiffusion) {
  const auto cfg = write("r.json", R"({"kind": "diffusion",
      "model": {"builtin": "random_single_action", "params": {"seed": 3, "dx": 0.1}},
      "algorithm": "pde-rvi", "options": {"T": 30, "record_every": 1000},
      "compare": {"beta_tol": 1e-6, "value_tol": 1e-5, "relative": false}})");
  EXPECT_EQ(cmd_compare(cfg, dir_, out_, err_), kOk) << err_.str() << out_.str();
  EXPECT_EQ(load_json(dir_ / "compare.json")["oracle"], "discrete");
}

TEST_F(Cli, CompareRejectsOracleAlgorithm) {
  const auto cfg = write("o.json", R"({"kind": "mdp", "model": {"builtin": "e1"}, "algorithm": "oracle"})");
  EXPECT_EQ(cmd_compare(cfg, dir_, out_, err_), kConfigError);
}

TEST_F(Cli, OracleAlgorithmSolves) {
  const auto cfg = write("o.json", R"({"kind": "ctmc", "model": {"builtin": "c1"}, "algorithm": "oracle"})");
  EXPECT_EQ(cmd_solve(cfg, dir_, out_, err_), kOk) << err_.str();
  EXPECT_NEAR(load_json(dir_ / "summary.json")["terminal_beta"].get<double>(), 2.0 / 3.0, 1e-12);
}

TEST_F(Cli, ReducibleOracleReported) {
  const auto cfg = write("o.json", R"({"kind": "diffusion", "model": {"builtin": "random_single_action",
      "boundary": "dirichlet"}, "algorithm": "oracle"})");
  EXPECT_EQ(cmd_solve(cfg, dir_, out_, err_), kValidationFailure);
  EXPECT_NE(err_.str().find("oracle infeasible"), std::string::npos);
}

TEST_F(Cli, ExecutableExitCodes) {
  const std::string exe = ERGODIC_RVI_EXE;
  const auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("validate --config " + (kConfigs / "mdp_e1.json").string()), 0);
  EXPECT_EQ(run("solve --config " + (kConfigs / "mdp_e1.json").string() + " --out " + dir_.string() + " --threads 1"), 0);
  EXPECT_EQ(run("validate"), kConfigError);
  EXPECT_EQ(run("compare --config " + (kConfigs / "diffusion_lq_coarse.json").string() + " --out " + dir_.string()),
            kComparisonFailure);
}
