#include <gtest/gtest.h>

#include <cmath>

#include "ergodic/ctmc_rvi.hpp"
#include "ergodic/problems.hpp"
#include "generators.hpp"

using namespace ergodic;

namespace {

ValueField field(std::vector<double> v, std::size_t anchor = 1) { return ValueField{std::move(v), anchor, 0.0}; }

std::vector<double> euler_vi(const CtmcModel& m, ValueField h, double beta, double dt, int steps) {
  for (int k = 0; k < steps; ++k) {
    const auto f = ctmc_vi_rhs(m, h, beta);
    for (std::size_t i = 0; i < h.size(); ++i) h.values[i] += dt * f[i];
  }
  return h.values;
}

}  // namespace

TEST(CtmcRviRhs, ZeroField) {
  EXPECT_EQ(ctmc_rvi_rhs(example_ctmc(), field({0, 0})), (std::vector<double>{1, 0}));
}

TEST(CtmcRviRhs, EquilibriumIsValuePlusBeta) {
  const auto f = ctmc_rvi_rhs(example_ctmc(), field({1.0, 2.0 / 3.0}));
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_NEAR(f[1], 0.0, 1e-15);
}

TEST(CtmcRviRhs, ShiftSubtractsConstant) {
  const auto a = ctmc_rvi_rhs(example_ctmc(), field({0.3, -1.2}));
  const auto b = ctmc_rvi_rhs(example_ctmc(), field({5.3, 3.8}));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(b[i], a[i] - 5.0, 1e-12);
}

TEST(CtmcViRhs, EquilibriumIsValue) {
  const auto f = ctmc_vi_rhs(example_ctmc(), field({1.0 / 3.0, 0.0}), 2.0 / 3.0);
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_NEAR(f[1], 0.0, 1e-15);
}

TEST(CtmcViRhs, ZeroFieldZeroBeta) {
  EXPECT_EQ(ctmc_vi_rhs(example_ctmc(), field({0, 0}), 0.0), (std::vector<double>{1, 0}));
}

TEST(CtmcViRhs, BetaShift) {
  const auto h = field({0.7, -0.1});
  const auto a = ctmc_vi_rhs(example_ctmc(), h, 0.4);
  const auto b = ctmc_vi_rhs(example_ctmc(), h, 0.4 + 0.25);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(b[i], a[i] - 0.25, 1e-15);
}

TEST(Integrate, OneEulerStepOfConstantRhs) {
  OdeOptions opts;
  opts.dt = 0.1;
  opts.T = 0.1;
  opts.method = OdeMethod::euler;
  const OdeRhs f = [](std::span<const double>, std::span<double> out) {
    out[0] = 2.0;
    out[1] = -1.0;
  };
  const auto trace = integrate(f, field({1, 1}), opts);
  ASSERT_EQ(trace.fields.size(), 2u);
  EXPECT_DOUBLE_EQ(trace.fields.back()[0], 1.2);
  EXPECT_DOUBLE_EQ(trace.fields.back()[1], 0.9);
}

TEST(Integrate, C1Rk4ReachesEquilibrium) {
  const auto m = example_ctmc();
  const OdeRhs f = [&](std::span<const double> h, std::span<double> out) {
    const auto r = ctmc_rvi_rhs(m, ValueField{{h.begin(), h.end()}, m.anchor, 0.0});
    std::copy(r.begin(), r.end(), out.begin());
  };
  OdeOptions opts;
  opts.record_every = 100;
  const auto trace = integrate(f, field({0, 0}), opts);
  EXPECT_NEAR(trace.fields.back()[0], 1.0, 1e-6);
  EXPECT_NEAR(trace.fields.back()[1], 2.0 / 3.0, 1e-6);
  EXPECT_NEAR(trace.beta_estimates.back(), 2.0 / 3.0, 1e-6);
  for (std::size_t k = 1; k < trace.times.size(); ++k) EXPECT_LT(trace.times[k - 1], trace.times[k]);
  EXPECT_EQ(trace.times.front(), 0.0);
  EXPECT_NEAR(trace.times.back(), 50.0, 1e-9);
}

TEST(Integrate, EulerIsFirstOrder) {
  const auto m = example_ctmc();
  const OdeRhs f = [&](std::span<const double> h, std::span<double> out) {
    const auto r = ctmc_rvi_rhs(m, ValueField{{h.begin(), h.end()}, m.anchor, 0.0});
    std::copy(r.begin(), r.end(), out.begin());
  };
  OdeOptions ref;
  ref.dt = 1e-4;
  ref.T = 1.0;
  const auto exact = integrate(f, field({0, 0}), ref).fields.back();
  auto error = [&](double dt) {
    OdeOptions o;
    o.dt = dt;
    o.T = 1.0;
    o.method = OdeMethod::euler;
    return sup_distance(integrate(f, field({0, 0}), o).fields.back().values, exact.values);
  };
  const double ratio = error(0.02) / error(0.01);
  EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Integrate, RejectsBadStep) {
  const OdeRhs f = [](std::span<const double>, std::span<double> out) { out[0] = 0.0; };
  OdeOptions o;
  o.dt = 0.0;
  EXPECT_THROW(integrate(f, field({0}, 0), o), PreconditionError);
  o.dt = 1.0;
  o.T = 0.5;
  EXPECT_THROW(integrate(f, field({0}, 0), o), PreconditionError);
}

TEST(Integrate, DivergenceDetected) {
  const OdeRhs f = [](std::span<const double> h, std::span<double> out) {
    out[0] = 10.0 * h[0];
    out[1] = 0.0;
  };
  OdeOptions o;
  o.T = 100.0;
  const auto trace = integrate(f, field({1, 0}), o);
  EXPECT_TRUE(trace.diverged);
  EXPECT_LT(trace.times.back(), 100.0);
}

TEST(CtmcHjbResidual, Examples) {
  const auto m = example_ctmc();
  EXPECT_NEAR(ctmc_hjb_residual(m, field({1.0 / 3.0, 0.0}), 2.0 / 3.0), 0.0, 1e-15);
  EXPECT_EQ(ctmc_hjb_residual(m, field({0, 0}), 0.0), 1.0);
  EXPECT_NEAR(ctmc_hjb_residual(m, field({0.2, 0.9}), 0.3), ctmc_hjb_residual(m, field({7.2, 7.9}), 0.3), 1e-12);
}

TEST(ExactCtmc, C1) {
  const auto s = exact_ctmc(example_ctmc());
  EXPECT_NEAR(s.beta, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.value[0], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(s.value[1], 0.0);
  EXPECT_LE(s.residual, 1e-9);
}

TEST(ExactCtmc, ConstantCost) {
  auto m = random_ctmc(4, 4, 2);
  for (auto& s : m.states)
    for (auto& a : s) a.cost = 1.5;
  const auto s = exact_ctmc(m);
  EXPECT_NEAR(s.beta, 1.5, 1e-12);
  for (double v : s.value.values) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(ExactCtmc, RandomModelMatchesRviFlow) {
  const auto m = random_ctmc(12, 4, 2);
  const auto s = exact_ctmc(m);
  const auto r = solve_ctmc(m, CtmcFlow::rvi, {});
  EXPECT_NEAR(r.terminal_beta, s.beta, 1e-6);
}

TEST(SolveCtmc, EulerGuard) {
  OdeOptions o;
  o.method = OdeMethod::euler;
  o.dt = 0.6;  // max exit rate of C1 is 2
  EXPECT_THROW(solve_ctmc(example_ctmc(), CtmcFlow::rvi, o), PreconditionError);
  o.dt = 0.5;
  EXPECT_NO_THROW(solve_ctmc(example_ctmc(), CtmcFlow::rvi, o));
}

TEST(SolveCtmc, ConvergedWithinTolerance) {
  const auto r = solve_ctmc(example_ctmc(), CtmcFlow::rvi, {}, 1e-8);
  EXPECT_EQ(r.status, SolveStatus::converged);
  EXPECT_LE(r.records.back().sup_change, 1e-8);
}

TEST(CtmcProperty, RviEquilibriumShift) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = random_ctmc(seed, 2 + seed % 4, 1 + seed % 3);
    const auto s = exact_ctmc(m);
    const auto f = ctmc_rvi_rhs(m, shifted(s.value, s.beta));
    EXPECT_LE(sup_norm(f), 1e-12 * (1.0 + std::abs(s.beta)) * 10) << seed;
  }
}

TEST(CtmcProperty, EulerViPreservesOrder) {
  testgen::Gen g(21);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = random_ctmc(seed, 2 + seed % 4, 1 + seed % 3);
    const double dt = 1.0 / max_exit_rate(m);
    auto [v, w] = g.ordered(m.size(), m.anchor);
    for (int k = 0; k < 20; ++k) {
      const auto fv = ctmc_vi_rhs(m, v, 1.0);
      const auto fw = ctmc_vi_rhs(m, w, 1.0);
      for (std::size_t i = 0; i < v.size(); ++i) {
        v.values[i] += dt * fv[i];
        w.values[i] += dt * fw[i];
      }
      // Equal coordinates can differ by one ulp after the update.
      ASSERT_TRUE(testgen::leq(v.values, w.values, 1e-12)) << seed << " step " << k;
    }
  }
}

TEST(CtmcProperty, EulerViIsNonexpansive) {
  testgen::Gen g(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto m = random_ctmc(seed, 2 + seed % 4, 1 + seed % 3);
    const double dt = 0.5 / max_exit_rate(m);
    const auto a = g.field(m.size(), m.anchor);
    const auto b = g.field(m.size(), m.anchor);
    const auto ea = euler_vi(m, a, 0.7, dt, 50);
    const auto eb = euler_vi(m, b, 0.7, dt, 50);
    EXPECT_LE(sup_distance(ea, eb), sup_distance(a.values, b.values) + 1e-12) << seed;
  }
}

TEST(CtmcProperty, EulerRviViIdentity) {
  testgen::Gen g(77);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = random_ctmc(seed, 2 + seed % 4, 1 + seed % 3);
    const double beta = exact_ctmc(m).beta;
    const double dt = 0.5 / max_exit_rate(m);
    auto h = g.field(m.size(), m.anchor);
    auto hbar = h;
    double c = 0.0;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const auto f = ctmc_rvi_rhs(m, h);
      const auto fbar = ctmc_vi_rhs(m, hbar, beta);
      c = (1.0 - dt) * c + dt * (beta - hbar.at_anchor());
      for (std::size_t i = 0; i < h.size(); ++i) {
        h.values[i] += dt * f[i];
        hbar.values[i] += dt * fbar[i];
      }
      for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, std::abs(h[i] - hbar[i] - c));
    }
    EXPECT_LE(worst, 1e-9) << seed;
  }
}

TEST(CtmcProperty, BetaEstimateConverges) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m = random_ctmc(seed, 3, 2);
    const auto r = solve_ctmc(m, CtmcFlow::rvi, {});
    EXPECT_NEAR(r.terminal_beta, exact_ctmc(m).beta, 1e-6) << seed;
  }
}
