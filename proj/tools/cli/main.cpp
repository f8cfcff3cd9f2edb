#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

// --threads wins over ERGODIC_RVI_THREADS; neither leaves the OpenMP default.
void configure_threads(int flag) {
  int n = flag;
  if (n <= 0) {
    if (const char* env = std::getenv("ERGODIC_RVI_THREADS")) n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative value iteration for ergodic control problems"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  int threads = 0;

  auto add_common = [&](CLI::App* sub, bool writes) {
    sub->add_option("--config", config, "Problem/run configuration (JSON)")->required();
    if (writes) sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "Worker threads (overrides ERGODIC_RVI_THREADS)")->check(CLI::PositiveNumber);
  };
  auto* validate = app.add_subcommand("validate", "Check a configuration and its model");
  auto* solve = app.add_subcommand("solve", "Run the configured algorithm and write trace/summary");
  auto* compare = app.add_subcommand("compare", "Run the algorithm and compare against the oracle");
  add_common(validate, false);
  add_common(solve, true);
  add_common(compare, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ergodic::cli::kConfigError;
  }

  configure_threads(threads);
  const std::optional<std::filesystem::path> out =
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);

  if (validate->parsed()) return ergodic::cli::cmd_validate(config, std::cout, std::cerr);
  if (solve->parsed()) return ergodic::cli::cmd_solve(config, out, std::cout, std::cerr);
  return ergodic::cli::cmd_compare(config, out, std::cout, std::cerr);
}
