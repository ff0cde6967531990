#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "plap/eigen.hpp"

using namespace plap;

namespace {

const double pi = std::numbers::pi;

ScalarField sample(const GridPtr& g, const std::function<double(Point)>& f) { return ScalarField::sample(g, f); }

ScalarField dirichlet_sines(const GridPtr& g) {
  return sample(g, [](Point x) { return std::sin(pi * x.x) * std::sin(pi * x.y); });
}

}  // namespace

TEST(RayleighTest, SineProductGivesTwoPiSquared) {
  auto err = [](int n) {
    const auto g = build_grid(Domain::unit_square(), n);
    return std::abs(rayleigh_quotient(dirichlet_sines(g), 2.0, Boundary::dirichlet) - 2 * pi * pi);
  };
  EXPECT_LT(err(64), 0.01 * 2 * pi * pi);
  EXPECT_NEAR(err(32) / err(64), 4.0, 0.5);
}

TEST(RayleighTest, HomogeneousOfDegreeZero) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto v = dirichlet_sines(g);
  for (double p : {1.5, 2.0, 5.0}) {
    ScalarField w = v;
    w *= -7.25;
    EXPECT_NEAR(rayleigh_quotient(w, p, Boundary::dirichlet), rayleigh_quotient(v, p, Boundary::dirichlet),
                1e-12 * rayleigh_quotient(v, p, Boundary::dirichlet));
  }
}

TEST(RayleighTest, NeumannLinearField) {
  // Trapezoid-rule integrals of the lumped mass: sum v^2 m = 1/12 + h^2/6.
  const auto g = build_grid(Domain::unit_square(), 32);
  const double h = g->spacing();
  const auto v = sample(g, [](Point x) { return x.x - 0.5; });
  EXPECT_NEAR(rayleigh_quotient(v, 2.0, Boundary::neumann), 12.0 / (1.0 + 2.0 * h * h), 1e-10);
  EXPECT_NEAR(rayleigh_quotient(v, 2.0, Boundary::neumann), 12.0, 0.005 * 12.0);
}

TEST(RayleighTest, RejectsInadmissibleFields) {
  const auto g = build_grid(Domain::unit_square(), 16);
  EXPECT_THROW(rayleigh_quotient(ScalarField(g), 2.0, Boundary::dirichlet), ConfigError);
  EXPECT_THROW(rayleigh_quotient(sample(g, [](Point x) { return x.x; }), 2.0, Boundary::dirichlet), ConfigError);
  EXPECT_THROW(rayleigh_quotient(sample(g, [](Point x) { return x.x; }), 2.0, Boundary::neumann), ConfigError);
}

TEST(ProjectionTest, PTwoSubtractsMean) {
  const auto g = build_grid(Domain::interval(0.0, 1.0), 10);
  const auto v = sample(g, [](Point x) { return x.x * x.x; });
  const ScalarField w = project_zero_pmean(v, 2.0);
  detail::PEnergy e(g);
  double s = 0.0;
  for (int k = 0; k < g->size(); ++k) s += e.mass()[static_cast<std::size_t>(k)] * w[k];
  EXPECT_NEAR(s, 0.0, 1e-14);
  EXPECT_NEAR(v[3] - w[3], v[7] - w[7], 1e-15);
}

TEST(ProjectionTest, TwoValueExamples) {
  std::vector<double> v = {-1, 3, -1, 3}, w = {1, 1, 1, 1};
  EXPECT_NEAR(detail::zero_pmean_shift(v, w, 2.0), 1.0, 1e-12);
  v = {-1, 2, -1, 2};
  EXPECT_NEAR(detail::zero_pmean_shift(v, w, 3.0), 0.5, 1e-12);
  // Unequal weights, odd p: brute-force bisection on the defining sum.
  v = {-2.0, 0.3, 1.0, 4.0};
  w = {0.5, 2.0, 1.0, 0.25};
  for (double p : {1.3, 3.0, 7.5}) {
    auto f = [&](double c) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::pow(std::abs(v[i] - c), p - 1) * (v[i] > c ? 1 : -1);
      return s;
    };
    double lo = -2.0, hi = 4.0;
    for (int i = 0; i < 200; ++i) (f(0.5 * (lo + hi)) > 0 ? lo : hi) = 0.5 * (lo + hi);
    EXPECT_NEAR(detail::zero_pmean_shift(v, w, p), 0.5 * (lo + hi), 1e-11) << "p=" << p;
  }
}

TEST(ProjectionTest, ConstantRejected) {
  const auto g = build_grid(Domain::unit_square(), 8);
  EXPECT_THROW(project_zero_pmean(ScalarField(g, 2.0), 3.0), ConfigError);
}

TEST(DirichletEigenTest, UnitSquarePTwo) {
  const auto g = build_grid(Domain::unit_square(), 64);
  const EigenResult r = dirichlet_eigen_first(g, 2.0);
  EXPECT_NEAR(r.raw_eigenvalue, 2 * pi * pi, 0.02 * 2 * pi * pi);
  EXPECT_NEAR(r.root_eigenvalue, std::sqrt(r.raw_eigenvalue), 1e-14);
  EXPECT_GE(r.eigenfunction.min(), 0.0);
  EXPECT_NEAR(r.eigenfunction.max(), 1.0, 1e-15);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1] * (1 + 1e-14));
}

TEST(DirichletEigenTest, DiscPTwoIsBesselZero) {
  const auto g = build_grid(Domain::disc({0, 0}, 1.0), 64);
  const EigenResult r = dirichlet_eigen_first(g, 2.0);
  EXPECT_NEAR(r.root_eigenvalue, oracle::bessel_j0_zero(1), 0.02 * oracle::bessel_j0_zero(1));
}

TEST(DirichletEigenTest, ScaledStartGivesSameEigenvalue) {
  const auto g = build_grid(Domain::unit_square(), 32);
  for (double p : {2.0, 4.0}) {
    ScalarField v0 = sample(g, [](Point x) { return x.x * (1 - x.x) * x.y * (1 - x.y) * (1 + 0.3 * x.x); });
    for (int k = 0; k < g->size(); ++k)
      if (!g->interior(k)) v0[k] = 0.0;
    ScalarField v1 = v0;
    v1 *= 10.0;
    const double a = dirichlet_eigen_first(g, p, {}, &v0).raw_eigenvalue;
    const double b = dirichlet_eigen_first(g, p, {}, &v1).raw_eigenvalue;
    EXPECT_NEAR(a, b, 1e-8 * a) << "p=" << p;
  }
}

TEST(DirichletEigenTest, DomainScalingLaw) {
  const Domain sq = Domain::unit_square();
  for (double p : {2.0, 4.0}) {
    const double base = dirichlet_eigen_first(build_grid(sq, 48), p).root_eigenvalue;
    for (double t : {0.5, 2.0}) {
      const double scaled = dirichlet_eigen_first(build_grid(sq.scaled(t), 48), p).root_eigenvalue;
      EXPECT_NEAR(scaled * t, base, 1e-6 * base) << "p=" << p << " t=" << t;
    }
  }
}

TEST(DirichletEigenTest, CheegerLowerBound) {
  const double h = cheeger_convex(Domain::unit_square()).h;
  const auto g = build_grid(Domain::unit_square(), 48);
  EXPECT_GE(4.0 * dirichlet_eigen_first(g, 2.0).raw_eigenvalue, h * h);
}

TEST(DirichletEigenTest, NearOneApproachesCheegerConstant) {
  const double h = cheeger_convex(Domain::unit_square()).h;
  const auto g = build_grid(Domain::unit_square(), 48);
  const double root = dirichlet_eigen_first(g, 1.1).root_eigenvalue;
  EXPECT_NEAR(root, h, 0.2 * h);
}

TEST(NeumannEigenTest, UnitSquarePTwo) {
  const auto g = build_grid(Domain::unit_square(), 48);
  const EigenResult r = neumann_eigen_first(g, 2.0);
  EXPECT_NEAR(r.root_eigenvalue, pi, 0.02 * pi);
  EXPECT_GT(r.eigenfunction.max(), 0.0);
  EXPECT_LT(r.eigenfunction.min(), 0.0);
  EXPECT_NO_THROW(rayleigh_quotient(r.eigenfunction, 2.0, Boundary::neumann));
}

TEST(NeumannEigenTest, IntervalPTwo) {
  const auto g = build_grid(Domain::interval(-1.0, 1.0), 200);
  const EigenResult r = neumann_eigen_first(g, 2.0);
  EXPECT_NEAR(r.root_eigenvalue, pi / 2, 0.01 * pi / 2);
}

TEST(NeumannEigenTest, SignChangeAtEveryP) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const SweepReport rep = p_sweep(Boundary::neumann, g, {2.0, 3.0, 6.0});
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    ASSERT_TRUE(rep.entries[i].error.empty()) << rep.entries[i].error;
    EXPECT_GT(rep.results[i].eigenfunction.max(), 0.0);
    EXPECT_LT(rep.results[i].eigenfunction.min(), 0.0);
  }
}

TEST(NeumannEigenTest, SzegoWeinbergerAtPTwo) {
  const double r = 1.0 / std::sqrt(pi);
  const double disc_exact = oracle::bessel_j1_prime_zero() / r;
  EXPECT_NEAR(oracle::bessel_j1_prime_zero(), 1.8411837813, 1e-9);
  const double square = neumann_eigen_first(build_grid(Domain::unit_square(), 48), 2.0).root_eigenvalue;
  const double disc = neumann_eigen_first(build_grid(Domain::disc({0, 0}, r), 64), 2.0).root_eigenvalue;
  EXPECT_NEAR(square, pi, 0.02 * pi);
  EXPECT_NEAR(disc, disc_exact, 0.02 * disc_exact);
  EXPECT_LE(square, disc);
  EXPECT_LE(2.0 / diameter(Domain::unit_square()), 2.0 / diameter(Domain::disc({0, 0}, r)));
}

TEST(ChainTest, NeumannBelowDirichlet) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto d = p_sweep(Boundary::dirichlet, g, {2.0, 4.0, 8.0});
  const auto n = p_sweep(Boundary::neumann, g, {2.0, 4.0, 8.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(n.entries[i].root, d.entries[i].root) << "p=" << d.entries[i].p;
}

TEST(SweepTest, EntriesAndTargets) {
  const auto g = build_grid(Domain::disc({0, 0}, 1.0), 24);
  const auto rep = p_sweep(Boundary::dirichlet, g, {2.0, 4.0});
  ASSERT_EQ(rep.entries.size(), 2u);
  EXPECT_EQ(rep.entries[0].target, 1.0);
  for (const auto& e : rep.entries) EXPECT_NEAR(e.relative_gap, std::abs(e.root - e.target) / e.target, 1e-15);
  EXPECT_LT(rep.entries[0].p, rep.entries[1].p);
  EXPECT_THROW(p_sweep(Boundary::dirichlet, g, {4.0, 2.0}), ConfigError);
  EXPECT_THROW(p_sweep(Boundary::dirichlet, g, {}), ConfigError);
}

TEST(SweepTest, ThreadedIndependentSolvesMatchSequential) {
  const auto g = build_grid(Domain::unit_square(), 24);
  const auto a = p_sweep(Boundary::neumann, g, {2.0, 3.0}, {}, false, 1);
  const auto b = p_sweep(Boundary::neumann, g, {2.0, 3.0}, {}, false, 2);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a.entries[i].raw, b.entries[i].raw);
}

TEST(DiagonalProfileTest, CosineDeviation) {
  // Closed form: the normalized diagonal profile of cos(pi x) is sin(pi t / 2).
  double want = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double t = -1.0 + 2.0 * i / 200000;
    want = std::max(want, std::abs(std::sin(pi * t / 2) - t));
  }
  EXPECT_NEAR(want, 0.21, 1e-2);
  const auto g = build_grid(Domain::unit_square(), 64);
  const auto prof = diagonal_profile(sample(g, [](Point x) { return std::cos(pi * x.x); }), 1001);
  EXPECT_NEAR(prof.max_deviation, want, 2e-3);
}

TEST(DiagonalProfileTest, LinearRampAndRejection) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto prof = diagonal_profile(sample(g, [](Point x) { return x.x + x.y - 1.0; }));
  EXPECT_LT(prof.max_deviation, 1e-12);
  EXPECT_NEAR(prof.samples.front().t, -1.0, 1e-15);
  EXPECT_NEAR(prof.samples.back().t, 1.0, 1e-15);
  const auto r = build_grid(Domain::rectangle({0, 0}, {2, 1}), 16);
  EXPECT_THROW(diagonal_profile(sample(r, [](Point x) { return x.x; })), ConfigError);
}

TEST(NodalDistanceTest, ClosedForms) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto d = nodal_distances(sample(g, [](Point x) { return std::cos(pi * x.x); }));
  EXPECT_NEAR(d.d_plus, 0.5, 1e-9);
  EXPECT_NEAR(d.d_minus, 0.5, 1e-9);
  const auto i = build_grid(Domain::interval(-1.0, 1.0), 20);
  const auto e = nodal_distances(sample(i, [](Point x) { return x.x; }));
  EXPECT_NEAR(e.d_plus, 1.0, 1e-12);
  EXPECT_NEAR(e.d_minus, 1.0, 1e-12);
  EXPECT_THROW(nodal_distances(ScalarField(g, 1.0)), ConfigError);
}

TEST(SecondEigenTest, SquarePTwoIsFivePiSquared) {
  const auto g = build_grid(Domain::unit_square(), 32);
  const auto s = second_dirichlet_eigen_experiment(g, 2.0);
  EXPECT_NEAR(s.result.raw_eigenvalue, 5 * pi * pi, 0.03 * 5 * pi * pi);
  EXPECT_GT(s.result.eigenfunction.max(), 0.0);
  EXPECT_LT(s.result.eigenfunction.min(), 0.0);
}

TEST(SecondEigenTest, RectangleNodalLineParallelToShortSides) {
  const auto g = build_grid(Domain::rectangle({0, 0}, {2, 1}), 48);
  const auto s = second_dirichlet_eigen_experiment(g, 2.0);
  EXPECT_EQ(s.orientation, NodalOrientation::parallel);
  EXPECT_LT(s.defects[0], 0.05);
  const double want = pi * pi * (1.0 + 1.0);  // (2 pi / 2)^2 + pi^2
  EXPECT_NEAR(s.result.raw_eigenvalue, want, 0.03 * want);
}
