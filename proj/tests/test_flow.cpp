#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plap/flow.hpp"
#include "plap/radial.hpp"

using namespace plap;

namespace {

const double pi = std::numbers::pi;

ScalarField sample(const GridPtr& g, const std::function<double(Point)>& f) { return ScalarField::sample(g, f); }

}  // namespace

TEST(StepFlowTest, ZeroStaysZero) {
  const auto g = build_grid(Domain::unit_square(), 16);
  const double dt = max_flow_dt(g->spacing(), 3.0);
  EXPECT_EQ(step_flow(ScalarField(g), 3.0, dt, 1e-6, Boundary::dirichlet).sup_norm(), 0.0);
  EXPECT_EQ(step_flow(ScalarField(g), 3.0, dt, 1e-6, Boundary::neumann).sup_norm(), 0.0);
}

TEST(StepFlowTest, LinearInteriorUnchanged) {
  const auto g = build_grid(Domain::unit_square(), 16);
  const auto u = sample(g, [](Point x) { return 2 * x.x - x.y + 0.3; });
  for (double p : {1.5, 2.0, 6.0}) {
    const auto v = step_flow(u, p, max_flow_dt(g->spacing(), p), 0.0, Boundary::dirichlet);
    for (int k = 0; k < g->size(); ++k) {
      if (!g->interior(k)) continue;
      EXPECT_NEAR(v[k], u[k], 1e-14);
    }
  }
}

TEST(StepFlowTest, PTwoIsHeatStepWithHalfDiffusivity) {
  const auto g = build_grid(Domain::disc({0, 0}, 1.0), 32);
  const auto u = sample(g, [](Point x) { return std::cos(x.x) * std::exp(x.y) + 0.2 * x.x; });
  const double h = g->spacing(), dt = max_flow_dt(h, 2.0);
  const auto v = step_flow(u, 2.0, dt, 0.0, Boundary::dirichlet);
  const int up = g->offset(0, 1);
  for (int k = 0; k < g->size(); ++k) {
    if (!g->interior(k)) continue;
    const double lap = (u[k + 1] + u[k - 1] + u[k + up] + u[k - up] - 4 * u[k]) / (h * h);
    EXPECT_NEAR(v[k], u[k] + 0.5 * dt * lap, 1e-13);
  }
}

TEST(StepFlowTest, RejectsUnstableStep) {
  const auto g = build_grid(Domain::unit_square(), 16);
  const auto u = sample(g, [](Point x) { return x.x; });
  const double dt = max_flow_dt(g->spacing(), 4.0);
  EXPECT_NO_THROW(step_flow(u, 4.0, dt, 0.0, Boundary::dirichlet));
  EXPECT_THROW(step_flow(u, 4.0, 1.01 * dt, 0.0, Boundary::dirichlet), ConfigError);
  EXPECT_THROW(step_flow(u, 1.0, dt, 0.0, Boundary::dirichlet), ConfigError);
  FlowConfig c;
  c.dt = 2 * dt;
  c.p = 4.0;
  EXPECT_THROW(run_flow(u, c), ConfigError);
}

TEST(StepFlowTest, NeumannNeedsBoxDomain) {
  const auto g = build_grid(Domain::disc({0, 0}, 1.0), 16);
  EXPECT_THROW(step_flow(ScalarField(g), 2.0, 1e-4, 0.0, Boundary::neumann), ConfigError);
}

TEST(FlowTest, DirichletComparisonPrinciple) {
  const auto g = build_grid(Domain::unit_square(), 24);
  for (double p : {1.5, 3.0, 8.0}) {
    ScalarField u = sample(g, [](Point x) { return std::sin(2 * pi * x.x) * std::sin(pi * x.y) + 0.3 * x.x * x.y; });
    for (int k = 0; k < g->size(); ++k)
      if (!g->interior(k)) u[k] = 0.0;
    const double dt = max_flow_dt(g->spacing(), p);
    for (int s = 0; s < 200; ++s) {
      const auto v = step_flow(u, p, dt, 1e-6, Boundary::dirichlet);
      EXPECT_LE(v.max(), u.max() + 1e-14);
      EXPECT_GE(v.min(), u.min() - 1e-14);
      u = v;
    }
  }
}

TEST(FlowTest, SquareHeatDecayRate) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto u0 = sample(g, [](Point x) { return std::sin(pi * x.x) * std::sin(pi * x.y); });
  FlowConfig c;
  c.t_end = 0.5;
  const FlowRun run = run_flow(u0, c);
  for (std::size_t i = 1; i < run.sup_norms.size(); ++i) EXPECT_LE(run.sup_norms[i], run.sup_norms[i - 1]);
  const DecayFit fit = decay_rate(run);
  EXPECT_NEAR(fit.rate, pi * pi, 0.03 * pi * pi);
  EXPECT_GE(fit.r_squared, 0.999);
}

TEST(FlowTest, IntervalHeatDecayRate) {
  const auto g = build_grid(Domain::interval(-1.0, 1.0), 100);
  const auto u0 = sample(g, [](Point x) { return std::cos(pi * x.x / 2); });
  FlowConfig c;
  c.t_end = 4.0;
  const DecayFit fit = decay_rate(run_flow(u0, c));
  EXPECT_NEAR(fit.rate, pi * pi / 8, 0.01 * pi * pi / 8);
}

TEST(FlowTest, NeumannCosineModeOnInterval) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 64);
  const auto u0 = sample(g, [](Point x) { return std::cos(pi * x.x); });
  FlowConfig c;
  c.bc = Boundary::neumann;
  c.t_end = 1.0;
  const DecayFit fit = decay_rate(run_flow(u0, c));
  EXPECT_NEAR(fit.rate, pi * pi / 2, 0.01 * pi * pi / 2);
}

TEST(FlowTest, DiscPFourMatchesShootingEigenvalue) {
  const auto g = build_grid(Domain::disc({0, 0}, 1.0), 48);
  const auto u0 = sample(g, [](Point x) { return std::max(0.0, 1.0 - x.x * x.x - x.y * x.y) * (1 + 0.2 * x.x); });
  FlowConfig c;
  c.p = 4.0;
  c.t_end = 1.5;
  const DecayFit fit = decay_rate(run_flow(u0, c));
  const double lambda = radial_eigen_shoot(4.0, 2, 1.0, 1).lambda;
  EXPECT_NEAR(fit.rate, lambda, 0.1 * lambda);
}

TEST(DecayFitTest, RejectsShortOrGrowingTraces) {
  FlowRun run;
  for (int i = 0; i < 5; ++i) {
    run.times.push_back(i);
    run.sup_norms.push_back(std::exp(-i));
  }
  EXPECT_THROW(decay_rate(run), NumericalError);
  run = {};
  for (int i = 0; i < 40; ++i) {
    run.times.push_back(i);
    run.sup_norms.push_back(1.0 + i);
  }
  EXPECT_THROW(decay_rate(run), NumericalError);
  run = {};
  for (int i = 0; i < 40; ++i) {
    run.times.push_back(0.1 * i);
    run.sup_norms.push_back(3.0 * std::exp(-2.5 * 0.1 * i));
  }
  const DecayFit f = decay_rate(run);
  EXPECT_NEAR(f.rate, 2.5, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 32);
}
