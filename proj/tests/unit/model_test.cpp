#include "common.hpp"
#include "oracles.hpp"

#include "nsdp/errors.hpp"
#include "nsdp/model.hpp"

namespace nsdp {
namespace {

using unit::fixture;
using unit::sym2;
using unit::vec;

TEST(AdjointDg, Ex31AtOrigin) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  const SymMat y = sym2(0.3, -0.2, 0.7);
  EXPECT_NEAR(adjoint_dg(p, vec({0}), y)(0), 0.3 + 2 * -0.2 + 0.7, 1e-15);
  EXPECT_EQ(adjoint_dg(p, vec({0}), SymMat::zero(2))(0), 0.0);
  EXPECT_THROW(adjoint_dg(p, vec({0}), SymMat::zero(3)), DimensionError);
}

TEST(AdjointDg, AdjointIdentityOnFixtures) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (const auto& f : cli::builtin_fixtures()) {
    const NsdpProblem p = f.problem();
    for (int t = 0; t < 100; ++t) {
      Vec x(p.n), d(p.n);
      for (int i = 0; i < p.n; ++i) x(i) = nd(rng), d(i) = nd(rng);
      const SymMat y = SymMat::from_upper(testing::random_symmetric(p.m, rng));
      const double lhs = inner(dg_apply(p, x, d), y);
      const double rhs = d.dot(adjoint_dg(p, x, y));
      EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs))) << f.name;
    }
  }
}

TEST(AdjointDg, DiagonalEmbeddingSumsGradients) {
  QuadraticFunction g1 = QuadraticFunction::zero(2), g2 = QuadraticFunction::zero(2);
  g1.c_lin = vec({1, 2});
  g2.c_quad = Mat::Identity(2, 2);
  const MatrixPolyProblem mp = embed_diagonal_poly({g1, g2}, QuadraticFunction::zero(2));
  const NsdpProblem p = mp.to_problem();
  const Vec x = vec({0.5, -1});
  const Vec y = vec({2, 3});
  const Vec expect = y(0) * g1.gradient(x) + y(1) * g2.gradient(x);
  EXPECT_LE((adjoint_dg(p, x, SymMat::diag(y)) - expect).norm(), 1e-14);
}

TEST(LagrangianGrad, Ex31HasNoMultiplier) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const Mat b = testing::random_symmetric(2, rng);
    const SymMat y = SymMat::from_upper(b * b.transpose());
    const double g = lagrangian_grad(p, vec({0}), y)(0);
    EXPECT_NEAR(g, -1.0 - (y(0, 0) + 2 * y(0, 1) + y(1, 1)), 1e-14);
    EXPECT_LE(g, -1.0 + 1e-14);
  }
  EXPECT_EQ(lagrangian_grad(p, vec({0}), SymMat::zero(2))(0), -1.0);
}

TEST(LagrangianGrad, Ex42AtSolution) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  EXPECT_NEAR(lagrangian_grad(p, vec({0}), SymMat::diag(vec({1, 0})))(0), 0.0, 1e-15);
}

TEST(EmbedDiagonal, ScalarAndEx41) {
  QuadraticFunction id = QuadraticFunction::zero(1);
  id.c_lin = vec({1});
  const NsdpProblem p1 = embed_diagonal_poly({id}, QuadraticFunction::zero(1)).to_problem();
  EXPECT_EQ(p1.g_eval(vec({0.25}))(0, 0), 0.25);
  EXPECT_EQ(p1.dg_eval(vec({0.25}))[0](0, 0), 1.0);

  QuadraticFunction neg = id;
  neg.c_lin = vec({-1});
  const auto emb = embed_diagonal_nlp(1, {ScalarConstraint::from_quadratic(id),
                                          ScalarConstraint::from_quadratic(neg)},
                                      QuadraticFunction::zero(1));
  const SymMat g = emb.problem.g_eval(vec({0.3}));
  EXPECT_EQ(g.mat(), SymMat::diag(vec({0.3, -0.3})).mat());
  const SymMat g41 = fixture("ex-4.1").problem().g_eval(vec({0.3}));
  EXPECT_EQ(g.mat(), g41.mat());
}

TEST(EmbedDiagonal, OffDiagonalsExactlyZero) {
  const auto& f = fixture("nlp-mixed");
  const NsdpProblem p = f.problem();
  const auto g = f.nlp_constraints();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Vec x(p.n);
    for (int i = 0; i < p.n; ++i) x(i) = nd(rng);
    const SymMat gx = p.g_eval(x);
    for (int i = 0; i < p.m; ++i) {
      EXPECT_NEAR(gx(i, i), g[i].value(x), 1e-14);
      for (int j = i + 1; j < p.m; ++j) EXPECT_EQ(gx(i, j), 0.0);
    }
  }
}

TEST(EmbedDiagonal, CallbackDiagonalIsExact) {
  const auto& f = fixture("nlp-mixed");
  const auto g = f.nlp_constraints();
  const auto emb = embed_diagonal_nlp(f.problem().n, g, f.file.poly.objective);
  const Vec x = vec({0.3, -1.1});
  const SymMat gx = emb.problem.g_eval(x);
  for (int i = 0; i < gx.dim(); ++i) {
    EXPECT_EQ(gx(i, i), g[i].value(x));
    for (int j = i + 1; j < gx.dim(); ++j) EXPECT_EQ(gx(i, j), 0.0);
  }
}

TEST(EmbedDiagonal, ActiveCountMatchesRankDeficit) {
  const auto& f = fixture("nlp-mixed");
  const Vec x = f.point();
  const auto g = f.nlp_constraints();
  int active = 0;
  for (const auto& gi : g) active += std::abs(gi.value(x)) <= 1e-12;
  EXPECT_EQ(active, f.problem().m - matrix_rank(f.problem().g_eval(x)));
}

TEST(MatrixPoly, DerivativeAudit) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (const auto& f : cli::builtin_fixtures()) {
    const NsdpProblem p = f.problem();
    for (int t = 0; t < 20; ++t) {
      Vec x(p.n);
      for (int i = 0; i < p.n; ++i) x(i) = nd(rng);
      EXPECT_TRUE(audit_derivatives(p, x).passed(1e-9)) << f.name;
    }
  }
}

TEST(MatrixPoly, ValidateRejectsBadShapes) {
  MatrixPolyProblem mp = MatrixPolyProblem::empty(2, 2);
  mp.b_quad.push_back({1, 0, SymMat::zero(2)});
  EXPECT_THROW(mp.validate(), DimensionError);
  mp = MatrixPolyProblem::empty(2, 2);
  mp.a_lin.pop_back();
  EXPECT_THROW(mp.validate(), DimensionError);
}

TEST(CallbackProblem, FiniteDifferenceFallback) {
  const NsdpProblem p = make_callback_problem(
      2, 2, [](const Vec& x) { return std::sin(x(0)) + x(1) * x(1); },
      [](const Vec& x) { return sym2(std::exp(x(0)), x(0) * x(1), std::cos(x(1))); });
  EXPECT_FALSE(p.exact_derivatives);
  const Vec x = vec({0.3, -0.7});
  const auto dg = p.dg_eval(x);
  EXPECT_NEAR(dg[0](0, 0), std::exp(0.3), 1e-8);
  EXPECT_NEAR(dg[1](0, 1), 0.3, 1e-8);
  EXPECT_NEAR(dg[1](1, 1), -std::sin(-0.7), 1e-8);
  EXPECT_NEAR(p.grad_f_eval(x)(0), std::cos(0.3), 1e-8);
  EXPECT_TRUE(audit_derivatives(p, x).passed(1e-4));
}

TEST(Problem, RejectsWrongLength) {
  const NsdpProblem p = fixture("ex-3.2").problem();
  EXPECT_THROW(p.g_eval(vec({0})), DimensionError);
}

}  // namespace
}  // namespace nsdp
