// Throughput of the inner kernels: Bellman minimisation, CTMC right-hand
// side, one explicit PDE step and a full LQ solve.

#include <benchmark/benchmark.h>

#include "ergodic/ctmc_rvi.hpp"
#include "ergodic/discrete_rvi.hpp"
#include "ergodic/generator.hpp"
#include "ergodic/parabolic.hpp"
#include "ergodic/problems.hpp"

using namespace ergodic;

namespace {

ValueField ramp(std::size_t n, std::size_t anchor) {
  ValueField v{std::vector<double>(n), anchor, 0.0};
  for (std::size_t i = 0; i < n; ++i) v.values[i] = 0.01 * static_cast<double>(i * i % 97);
  return v;
}

void BM_BellmanMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mdp = random_mdp(1, n, 4, 0.3);
  const auto v = ramp(n, mdp.anchor);
  for (auto _ : state) benchmark::DoNotOptimize(bellman_min(mdp, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BellmanMin)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_CtmcRhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = random_ctmc(2, n, 3, 0.3);
  const auto v = ramp(n, m.anchor);
  for (auto _ : state) benchmark::DoNotOptimize(ctmc_rvi_rhs(m, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CtmcRhs)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_RhsMinLq(benchmark::State& state) {
  const double dx = 1.0 / static_cast<double>(state.range(0));
  const auto p = build_lq_benchmark(5.0, dx, 3.0, 0.1);
  const auto v = ramp(p.nodes(), p.anchor);
  for (auto _ : state) benchmark::DoNotOptimize(rhs_min(p, v));
  state.counters["nodes"] = static_cast<double>(p.nodes());
}
BENCHMARK(BM_RhsMinLq)->Arg(20)->Arg(40)->Arg(80);

void BM_PdeStepLq(benchmark::State& state) {
  const double dx = 1.0 / static_cast<double>(state.range(0));
  const auto p = build_lq_benchmark(5.0, dx, 3.0, 0.1);
  const double dt = cfl_max_dt(p);
  auto v = zero_field(p.nodes(), p.anchor);
  for (auto _ : state) {
    v = step(p, v, ParabolicMode::rvi(), dt);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_PdeStepLq)->Arg(20)->Arg(40)->Arg(80);

void BM_LqSolve(benchmark::State& state) {
  const auto p = build_lq_benchmark(5.0, 0.05, 3.0, 0.1);
  ParabolicOptions o;
  o.T = 20.0;
  o.record_every = 1000000;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), o));
}
BENCHMARK(BM_LqSolve)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
