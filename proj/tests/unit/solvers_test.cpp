#include "common.hpp"
#include "oracles.hpp"

#include "nsdp/errors.hpp"
#include "nsdp/solvers.hpp"

#include <cmath>

namespace nsdp {
namespace {

using unit::fixture;
using unit::vec;

TEST(InnerMinimize, ConvexQuadratic) {
  Mat a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Vec b = vec({1, -2, 3});
  const Objective q = [&](const Vec& x, Vec& g) {
    g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  const InnerResult r = inner_minimize(q, Vec::Zero(3), 1e-10, 200);
  EXPECT_EQ(r.status, "converged");
  EXPECT_LE((r.x - a.ldlt().solve(b)).norm(), 1e-9);
  EXPECT_LE(r.iterations, 50);
}

TEST(InnerMinimize, AlreadyStationary) {
  const Objective q = [](const Vec& x, Vec& g) {
    g = x;
    return 0.5 * x.squaredNorm();
  };
  const InnerResult r = inner_minimize(q, vec({0, 0}), 1e-8, 100);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.x, vec({0, 0}));
}

TEST(InnerMinimize, NeverIncreases) {
  const Objective rosen = [](const Vec& x, Vec& g) {
    g = vec({-2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0)), 200 * (x(1) - x(0) * x(0))});
    return std::pow(1 - x(0), 2) + 100 * std::pow(x(1) - x(0) * x(0), 2);
  };
  Vec g;
  const double f0 = rosen(vec({-1.2, 1}), g);
  const InnerResult r = inner_minimize(rosen, vec({-1.2, 1}), 1e-8, 5000);
  EXPECT_LE(r.f, f0);
  EXPECT_LE((r.x - vec({1, 1})).norm(), 1e-5);
}

TEST(InnerMinimize, DetectsUnbounded) {
  const Objective concave = [](const Vec& x, Vec& g) {
    g = -x;
    return -0.5 * x.squaredNorm();
  };
  EXPECT_EQ(inner_minimize(concave, vec({1, 0.5}), 1e-8, 1000).status, "unbounded");
}

TEST(AlGradient, Ex42AgainstFiniteDifferences) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  // x = 0 is where the projection switches branches; differences straddling it are inexact.
  for (double x : {-0.7, -0.01, 0.02, 0.3}) {
    const Vec g = al_gradient(p, vec({x}), 10.0, SymMat::zero(2));
    const Vec fd = testing::oracle_gradient([&](const Vec& z) { return al_value(p, z, 10.0, SymMat::zero(2)); },
                                            vec({x}));
    EXPECT_NEAR(g(0), fd(0), 1e-5 * (1 + std::abs(g(0))));
  }
}

TEST(AlGradient, FixturesAgainstFiniteDifferences) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& f : cli::builtin_fixtures()) {
    const NsdpProblem p = f.problem();
    for (int t = 0; t < 50; ++t) {
      Vec x(p.n);
      for (int i = 0; i < p.n; ++i) x(i) = u(rng);
      const double rho = std::pow(10.0, 2 * u(rng));
      const Mat b = testing::random_symmetric(p.m, rng);
      const SymMat yt = SymMat::from_upper(b * b.transpose());
      const Vec g = al_gradient(p, x, rho, yt);
      const Vec fd = testing::oracle_gradient([&](const Vec& z) { return al_value(p, z, rho, yt); }, x);
      EXPECT_LE((g - fd).norm(), 1e-5 * (1 + g.norm())) << f.name;
    }
  }
}

TEST(ExternalPenalty, Ex42) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  const SolverTrace t = solve_external_penalty(p, vec({1}), PenaltyConfig::geometric(12));
  EXPECT_TRUE(t.converged()) << t.termination;
  EXPECT_NEAR(t.last().x(0), 0.0, 1e-5);
  for (const auto& r : t.records) EXPECT_LE(r.y.fro(), 10.0);
}

TEST(ExternalPenalty, Ex31MultipliersBlowUp) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  const SolverTrace t = solve_external_penalty(p, vec({0.5}), PenaltyConfig::geometric(20));
  EXPECT_NEAR(t.last().x(0), 0.0, 1e-4);
  EXPECT_GE(t.last().y.fro(), 1e3);
}

TEST(ExternalPenalty, InteriorStationaryStartStopsAtOnce) {
  const NsdpProblem p = fixture("interior").problem();
  const SolverTrace t = solve_external_penalty(p, vec({0}), PenaltyConfig::geometric(10));
  EXPECT_TRUE(t.converged());
  EXPECT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.last().x(0), 0.0);
}

TEST(ExternalPenalty, ResidualsReproducible) {
  const NsdpProblem p = fixture("ex-3.3").problem();
  const SolverTrace t = solve_external_penalty(p, fixture("ex-3.3").start(), PenaltyConfig::geometric(8));
  for (const auto& r : t.records) {
    const KktResidual k = kkt_residual(p, r.x, r.y);
    EXPECT_NEAR(k.stationarity, r.residual.stationarity, 1e-12);
    EXPECT_NEAR(k.feasibility, r.residual.feasibility, 1e-12);
  }
}

TEST(AugmentedLagrangian, Ex42) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  const SolverTrace t = solve_augmented_lagrangian(p, vec({1}), {}, 1e-6, 30);
  ASSERT_TRUE(t.converged()) << t.termination;
  EXPECT_LE(t.last().residual.max(), 1e-6);
  EXPECT_LE(t.records.size(), 30u);
}

TEST(AugmentedLagrangian, PenaltyMonotoneAndFrozenByTest) {
  const NsdpProblem p = fixture("ex-3.3").problem();
  const AlConfig cfg;
  const SolverTrace t = solve_augmented_lagrangian(p, fixture("ex-3.3").start(), cfg, 1e-6, 40);
  for (size_t k = 1; k < t.records.size(); ++k) {
    const auto& prev = t.records[k - 1];
    const auto& cur = t.records[k];
    EXPECT_GE(cur.rho, prev.rho);
    const bool frozen = prev.v_norm <= cfg.theta * (k >= 2 ? t.records[k - 2].v_norm : INFINITY);
    if (k >= 2) EXPECT_EQ(prev.rho_frozen, frozen) << k;
    EXPECT_EQ(cur.rho == prev.rho, prev.rho_frozen) << k;
  }
}

TEST(AugmentedLagrangian, ZeroSafeguardMatchesPenalty) {
  const NsdpProblem p = fixture("ex-3.2").problem();
  AlConfig cfg;
  cfg.policy = SafeguardPolicy::Zero;
  const Vec x0 = fixture("ex-3.2").start();
  const SolverTrace al = solve_augmented_lagrangian(p, x0, cfg, 1e-6, 25);
  std::vector<double> rho, eps;
  for (const auto& r : al.records) {
    rho.push_back(r.rho);
    eps.push_back(r.inner_tol);
  }
  const SolverTrace pen = solve_external_penalty(p, x0, rho, eps, static_cast<int>(rho.size()));
  ASSERT_EQ(pen.records.size(), al.records.size());
  for (size_t k = 0; k < al.records.size(); ++k)
    EXPECT_LE((al.records[k].x - pen.records[k].x).norm(), 1e-12) << k;
}

TEST(AugmentedLagrangian, Ex31FeasibleButDivergent) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  const SolverTrace t = solve_augmented_lagrangian(p, vec({0.5}), {}, 1e-6, 60);
  EXPECT_NEAR(t.last().x(0), 0.0, 1e-4);
  EXPECT_LE(t.last().residual.feasibility, 1e-5);
  EXPECT_GE(t.last().y.fro(), 1e3);
  EXPECT_GT(t.last().rho, 1e3);
}

TEST(AugmentedLagrangian, ConfigValidation) {
  AlConfig c;
  c.theta = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  EXPECT_NEAR(c.epsilon(1, 1e-6), 0.1, 1e-15);
  EXPECT_NEAR(c.epsilon(40, 1e-6), 1e-6, 1e-20);
}

TEST(Sqp, Ex42) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  const SolverTrace t = solve_sqp(p, vec({1}), SymMat::zero(2), {}, 1e-6, 50);
  ASSERT_TRUE(t.converged()) << t.termination << " " << t.message;
  EXPECT_NEAR(t.last().x(0), 0.0, 1e-5);
  EXPECT_TRUE(akkt_check(p, t.certificate(), 1e-4).passed);
}

TEST(Sqp, StartsAtKktPair) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  const SolverTrace t = solve_sqp(p, vec({0}), SymMat::diag(vec({1, 0})), {}, 1e-6, 50);
  EXPECT_TRUE(t.converged());
  EXPECT_LE(t.records.size(), 2u);
}

TEST(Traces, JsonlRoundTrip) {
  const NsdpProblem p = fixture("ex-3.3").problem();
  const SolverTrace t = solve_augmented_lagrangian(p, fixture("ex-3.3").start(), {}, 1e-6, 20);
  const SolverTrace back = trace_from_jsonl(trace_to_jsonl(t));
  ASSERT_EQ(back.records.size(), t.records.size());
  EXPECT_EQ(back.termination, t.termination);
  EXPECT_EQ(back.solver, t.solver);
  for (size_t k = 0; k < t.records.size(); ++k) {
    EXPECT_EQ(back.records[k].x, t.records[k].x);
    EXPECT_EQ(back.records[k].y.mat(), t.records[k].y.mat());
    EXPECT_EQ(back.records[k].delta.mat(), t.records[k].delta.mat());
    EXPECT_EQ(back.records[k].rho, t.records[k].rho);
  }
  EXPECT_EQ(trace_to_jsonl(back), trace_to_jsonl(t));
}

}  // namespace
}  // namespace nsdp
