#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ergodic/diagnostics.hpp"
#include "ergodic/parabolic.hpp"
#include "ergodic/problems.hpp"
#include "generators.hpp"

using namespace ergodic;

namespace {

const DiffusionProblem& lq() {
  static const auto p = build_lq_benchmark(5.0, 0.05, 3.0, 0.1);
  return p;
}

const ParabolicResult& lq_rvi_run() {
  static const auto r = [] {
    ParabolicOptions o;
    o.T = 20.0;
    o.record_every = 2000;
    return solve_parabolic(lq(), zero_field(lq().nodes(), lq().anchor), ParabolicMode::rvi(), o);
  }();
  return r;
}

}  // namespace

TEST(Step, EquilibriumUnchanged) {
  const auto p = build_constant_cost_diffusion(2.0, 0.1, 1.0);
  ValueField v{std::vector<double>(p.nodes(), 4.0), p.anchor, 0.0};
  const auto out = step(p, v, ParabolicMode::vi(1.0), 0.5 * cfl_max_dt(p));
  EXPECT_EQ(out.values, v.values);
}

TEST(Step, ViStepIsDefinitional) {
  const auto& p = lq();
  testgen::Gen g(1);
  const auto v = g.field(p.nodes(), p.anchor);
  const double dt = cfl_max_dt(p);
  const auto out = step(p, v, ParabolicMode::vi(0.8), dt);
  const auto m = rhs_min(p, v);
  for (std::size_t i = 0; i < p.nodes(); ++i) EXPECT_NEAR(out[i], v[i] + dt * (m.values[i] - 0.8), 1e-12);
  EXPECT_DOUBLE_EQ(out.stamp, dt);
}

TEST(Step, RejectsCflViolation) {
  const auto& p = lq();
  EXPECT_THROW(step(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), 1.01 * cfl_max_dt(p)),
               PreconditionError);
}

TEST(Step, TruncatedUsesForcingAtStamp) {
  const auto p = build_constant_cost_diffusion(2.0, 0.1, 0.0);
  ValueField v = zero_field(p.nodes(), p.anchor);
  v.stamp = 2.0;
  const auto out = step(p, v, ParabolicMode::truncated([](double t) { return t; }), 0.001);
  EXPECT_NEAR(out[p.anchor], -0.002, 1e-15);
}

TEST(StepProperty, ConstantEquivariance) {
  testgen::Gen g(2);
  const auto p = build_lq_benchmark(5.0, 0.1, 3.0, 0.2);
  const double dt = cfl_max_dt(p);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = g.field(p.nodes(), p.anchor);
    const double c = g.uniform(-20, 20);
    const auto vi_a = step(p, shifted(v, c), ParabolicMode::vi(0.8), dt);
    const auto vi_b = step(p, v, ParabolicMode::vi(0.8), dt);
    const auto rvi_a = step(p, shifted(v, c), ParabolicMode::rvi(), dt);
    const auto rvi_b = step(p, v, ParabolicMode::rvi(), dt);
    for (std::size_t i = 0; i < p.nodes(); ++i) {
      EXPECT_NEAR(vi_a[i], vi_b[i] + c, 1e-11);
      EXPECT_NEAR(rvi_a[i], rvi_b[i] + c * (1.0 - dt), 1e-11);
    }
  }
}

TEST(StepProperty, ViStepMonotone) {
  testgen::Gen g(3);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = seed % 2 ? build_lq_benchmark(5.0, 0.1, 3.0, 0.2) : random_single_action_diffusion(seed);
    const double dt = cfl_max_dt(p);
    auto [v, w] = g.ordered(p.nodes(), p.anchor);
    for (int k = 0; k < 5; ++k) {
      v = step(p, v, ParabolicMode::vi(1.0), dt);
      w = step(p, w, ParabolicMode::vi(1.0), dt);
      ASSERT_TRUE(testgen::leq(v.values, w.values)) << seed;
    }
  }
}

TEST(StepProperty, StrictSeparationAtAnchorAfterBurnIn) {
  // A bump far from the anchor reaches it through the positive off-diagonals.
  const auto p = build_lq_benchmark(5.0, 0.1, 3.0, 0.2);
  const double dt = cfl_max_dt(p);
  auto v = zero_field(p.nodes(), p.anchor);
  auto w = v;
  w.values[p.anchor + 20] = 1.0;
  for (int k = 0; k < 40; ++k) {
    if (k < 20) {
      EXPECT_EQ(v.at_anchor(), w.at_anchor()) << k;
    }
    v = step(p, v, ParabolicMode::vi(0.8), dt);
    w = step(p, w, ParabolicMode::vi(0.8), dt);
  }
  EXPECT_GT(w.at_anchor(), v.at_anchor());
}

TEST(SolveParabolic, LqRviRecoversBeta) {
  const auto& r = lq_rvi_run();
  const double beta = lq_exact(3.0).beta;
  EXPECT_NEAR(beta, 0.828427, 1e-6);
  EXPECT_LE(std::abs(r.report.terminal_beta - beta) / beta, 0.02);
  EXPECT_EQ(r.report.terminal_beta, r.run.anchor_readings.back());
}

TEST(SolveParabolic, RunBookkeeping) {
  const auto& r = lq_rvi_run();
  EXPECT_EQ(r.run.dt, cfl_max_dt(lq()));
  EXPECT_EQ(r.run.anchor_readings.size(), r.run.steps + 1);
  EXPECT_EQ(r.run.record_times.front(), 0.0);
  EXPECT_NEAR(r.run.record_times.back(), 20.0, 1e-9);
  for (std::size_t k = 1; k < r.run.record_times.size(); ++k)
    EXPECT_LT(r.run.record_times[k - 1], r.run.record_times[k]);
  EXPECT_EQ(r.run.snapshots.size(), r.report.records.size());
  EXPECT_EQ(r.run.final_policy, r.run.policies.back());
  EXPECT_EQ(r.report.status, SolveStatus::max_steps);
}

TEST(SolveParabolic, LqViRecoversValue) {
  const auto& p = lq();
  const auto exact = lq_exact(3.0);
  ParabolicOptions o;
  o.T = 20.0;
  o.record_every = 100000;
  const auto r = solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::vi(exact.beta), o);
  EXPECT_EQ(r.report.terminal_beta, exact.beta);
  const auto& v = r.report.terminal_value;
  double err = 0.0, scale = 0.0;
  for (auto i : core_nodes(p, 2.5)) {
    err = std::max(err, std::abs(v[i] - v.at_anchor() - exact.value(p.grid[i])));
    scale = std::max(scale, exact.value(p.grid[i]));
  }
  EXPECT_LE(err / scale, 0.05);
}

TEST(SolveParabolic, ConstantCostGivesUnitBetaAndFlatValue) {
  const auto p = build_constant_cost_diffusion(2.0, 0.1, 1.0);
  ParabolicOptions o;
  o.T = 10.0;
  const auto r = solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), o);
  EXPECT_NEAR(r.report.terminal_beta, 1.0, 1e-4);
  double s = 0.0;
  for (auto i : core_nodes(p, 1.0)) s = std::max(s, std::abs(r.report.terminal_value[i] - r.report.terminal_beta));
  EXPECT_LE(s, 1e-12);
}

TEST(SolveParabolic, StopsAtTolerance) {
  const auto p = build_constant_cost_diffusion(2.0, 0.1, 1.0);
  ParabolicOptions o;
  o.T = 100.0;
  o.tol = 1e-6;
  const auto r = solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), o);
  EXPECT_EQ(r.report.status, SolveStatus::converged);
  EXPECT_LE(r.report.records.back().sup_change, 1e-6);
  EXPECT_LT(r.run.record_times.back(), 100.0);
}

TEST(SolveParabolic, DivergenceDetected) {
  const auto& p = lq();
  ParabolicOptions o;
  o.T = 1.0;
  o.blowup = 0.5;
  const auto r = solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::vi(0.0), o);
  EXPECT_EQ(r.report.status, SolveStatus::diverged);
}

TEST(SolveParabolic, RejectsBadInput) {
  const auto& p = lq();
  EXPECT_THROW(solve_parabolic(p, zero_field(3, 0), ParabolicMode::rvi()), PreconditionError);
  ParabolicOptions o;
  o.dt = 1.0;
  EXPECT_THROW(solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), o), PreconditionError);
  EXPECT_THROW(solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::truncated({})), PreconditionError);
}

TEST(Dirichlet, CutoffAppliedAndEndsHeld) {
  auto p = build_lq_benchmark(5.0, 0.1, 3.0, 0.2);
  p.boundary = BoundaryKind::dirichlet;
  ValueField v0{std::vector<double>(p.nodes(), 1.0), p.anchor, 0.0};
  ParabolicOptions o;
  o.T = 1.0;
  o.record_every = 10;
  const auto r = solve_parabolic(p, v0, ParabolicMode::truncated([](double) { return 0.5; }), o);
  EXPECT_EQ(r.run.snapshots.front()[0], 0.0);
  EXPECT_EQ(r.run.snapshots.front()[p.anchor], 1.0);
  for (const auto& s : r.run.snapshots) {
    EXPECT_EQ(s[0], 0.0);
    EXPECT_EQ(s.values.back(), 0.0);
  }
}

TEST(Dirichlet, TruncatedFlowIsLipschitzInForcing) {
  auto p = build_lq_benchmark(5.0, 0.1, 3.0, 0.2);
  p.boundary = BoundaryKind::dirichlet;
  ParabolicOptions o;
  o.T = 2.0;
  const auto v0 = zero_field(p.nodes(), p.anchor);
  const auto a = solve_parabolic(p, v0, ParabolicMode::truncated([](double t) { return std::sin(t); }), o);
  const auto b = solve_parabolic(p, v0, ParabolicMode::truncated([](double t) { return std::sin(t) + 0.3; }), o);
  const double gap = sup_distance(a.report.terminal_value.values, b.report.terminal_value.values);
  EXPECT_LE(gap, 0.3 * 2.0 + 1e-9);
  EXPECT_GT(gap, 0.0);
}

TEST(Cutoff, ShapeOfPsi) {
  EXPECT_EQ(cutoff_weight(0.0, 4.0), 1.0);
  EXPECT_EQ(cutoff_weight(2.0, 4.0), 1.0);
  EXPECT_EQ(cutoff_weight(-3.0, 4.0), 0.0);
  EXPECT_EQ(cutoff_weight(3.5, 4.0), 0.0);
  EXPECT_NEAR(cutoff_weight(2.5, 4.0), 0.5, 1e-15);
  double prev = 1.0;
  for (double x = 2.0; x <= 3.0; x += 0.01) {
    const double w = cutoff_weight(x, 4.0);
    EXPECT_LE(w, prev + 1e-15);
    prev = w;
  }
  // C^1 and C^2 at the joins: one-sided differences vanish.
  const double h = 1e-4;
  EXPECT_NEAR((cutoff_weight(2.0 + h, 4.0) - 1.0) / h, 0.0, 1e-6);
  EXPECT_NEAR(cutoff_weight(3.0 - h, 4.0) / h, 0.0, 1e-6);
}

TEST(FieldCsv, HeaderAndRows) {
  const auto p = build_constant_cost_diffusion(1.0, 0.5, 1.0);
  ParabolicOptions o;
  o.T = 0.25;
  o.record_every = 1000;
  const auto r = solve_parabolic(p, zero_field(p.nodes(), p.anchor), ParabolicMode::rvi(), o);
  std::ostringstream os;
  write_field_csv(os, r.run, p);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("t,x,value,policy\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 1 + 2 * p.nodes());
}
