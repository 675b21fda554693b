#include "common.hpp"
#include "oracles.hpp"

#include "nsdp/cq.hpp"
#include "nsdp/errors.hpp"
#include "nsdp/verdict_io.hpp"

#include <cmath>

namespace nsdp {
namespace {

using unit::fixture;
using unit::vec;

CqVerdict run(const std::string& fx, CqKind kind) {
  const auto& f = fixture(fx);
  return check_cq(f.problem(), f.point(), kind, f.cq_options({}));
}

TEST(VFamily, Ex31IdentityBasis) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  for (double x : {-0.3, 0.0, 0.2}) {
    const VFamily v = v_family(p, vec({x}), Mat::Identity(2, 2));
    EXPECT_NEAR(v.at(0, 0)(0), 1.0, 1e-15);
    EXPECT_NEAR(v.at(1, 1)(0), 1.0, 1e-15);
    EXPECT_NEAR(v.at(0, 1)(0), 1.0 + 2.0 * x, 1e-15);
  }
}

TEST(VFamily, Ex31RotatedBasis) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  const double s = 1.0 / std::sqrt(2.0);
  Mat e(2, 2);
  e << -s, s, s, s;
  for (double x : {-0.3, 0.0, 0.2}) {
    const VFamily v = v_family(p, vec({x}), e);
    EXPECT_NEAR(v.at(0, 0)(0), -2.0 * x, 1e-14);
    EXPECT_NEAR(v.at(1, 1)(0), 2.0 * (1.0 + x), 1e-14);
    EXPECT_NEAR(v.at(0, 1)(0), 0.0, 1e-14);
  }
}

TEST(VFamily, DiagXXAnyBasis) {
  const NsdpProblem p = fixture("ex-4.2").problem();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const VFamily v = v_family(p, vec({0.1}), testing::random_orthogonal(2, rng));
    EXPECT_NEAR(v.at(0, 0)(0), 1.0, 1e-14);
    EXPECT_NEAR(v.at(1, 1)(0), 1.0, 1e-14);
  }
}

TEST(VFamily, SymmetricAndSignInvariant) {
  const NsdpProblem p = fixture("ex-3.2").problem();
  std::mt19937_64 rng(4);
  const Vec x = vec({0.2, -0.4});
  const Mat e = testing::random_orthogonal(2, rng);
  const VFamily v = v_family(p, x, e);
  const auto dg = p.dg_eval(x);
  EXPECT_LE((v_vector(dg, e.col(0), e.col(1)) - v_vector(dg, e.col(1), e.col(0))).norm(), 1e-15);
  Mat flipped = e;
  flipped.col(1) *= -1;
  const VFamily w = v_family(p, x, flipped);
  EXPECT_EQ(w.at(0, 0), v.at(0, 0));
  EXPECT_EQ(w.at(1, 1), v.at(1, 1));
  EXPECT_THROW(v_family(p, x, Mat::Identity(3, 3)), DimensionError);
}

TEST(VFamily, FullFamilySpanInvariantUnderRotation) {
  const NsdpProblem p = fixture("ex-3.2").problem();
  std::mt19937_64 rng(5);
  const Vec x = vec({0.3, 0.1});
  const int r0 = family_rank(v_family(p, x, Mat::Identity(2, 2)).upper());
  for (int t = 0; t < 100; ++t)
    EXPECT_EQ(family_rank(v_family(p, x, testing::random_orthogonal(2, rng)).upper()), r0);
}

TEST(Nondegeneracy, Examples) {
  const CqVerdict v = run("ex-3.1", CqKind::Nondegeneracy);
  EXPECT_EQ(v.status, CqStatus::Violated);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->family_at_bar.size(), 3u);
  EXPECT_EQ(run("interior", CqKind::Nondegeneracy).status, CqStatus::CertifiedHolds);

  // G(x) = Diag(1 + x1, x2) at 0: one active eigenvalue with v11 = e2.
  MatrixPolyProblem mp = MatrixPolyProblem::empty(2, 2);
  mp.a0 = SymMat::diag(vec({1, 0}));
  mp.a_lin[0] = SymMat::diag(vec({1, 0}));
  mp.a_lin[1] = SymMat::diag(vec({0, 1}));
  const CqVerdict one = check_nondegeneracy(mp.to_problem(), vec({0, 0}));
  EXPECT_EQ(one.status, CqStatus::CertifiedHolds);
  EXPECT_EQ(one.rank, 1);
}

TEST(Nondegeneracy, InfeasiblePointRejected) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  EXPECT_THROW(check_nondegeneracy(p, vec({-0.5})), InfeasiblePointError);
}

TEST(Robinson, Examples) {
  const CqVerdict r32 = run("ex-3.2", CqKind::Robinson);
  EXPECT_EQ(r32.status, CqStatus::CertifiedHolds);
  ASSERT_TRUE(r32.witness.has_value());
  EXPECT_GT(r32.witness->value, 0.0);

  const CqVerdict r43 = run("ex-4.3", CqKind::Robinson);
  EXPECT_EQ(r43.status, CqStatus::Violated);
  ASSERT_TRUE(r43.witness.has_value());
  const auto& fam = r43.witness->family_at_bar;
  ASSERT_EQ(fam.size(), 2u);
  EXPECT_LE((fam[0] + fam[1]).norm(), 1e-12);

  EXPECT_EQ(run("interior", CqKind::Robinson).status, CqStatus::CertifiedHolds);
}

TEST(WeakCq, Ex31WeakCpldOnNegativeRay) {
  const CqVerdict v = run("ex-3.1", CqKind::WeakCpld);
  ASSERT_EQ(v.status, CqStatus::Violated);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_TRUE(v.witness->bar_dependent);
  ASSERT_FALSE(v.witness->sequence.empty());
  for (const auto& pt : v.witness->sequence) {
    EXPECT_LT(pt.x(0), 0.0);
    EXPECT_FALSE(pt.dependent);
  }
  std::string why;
  EXPECT_TRUE(replay_witness(fixture("ex-3.1").problem(), v, &why)) << why;
}

TEST(WeakCq, Ex32WeakCrcqWitness) {
  const CqVerdict v = run("ex-3.2", CqKind::WeakCrcq);
  ASSERT_EQ(v.status, CqStatus::Violated);
  const Witness& w = *v.witness;
  for (const auto& pt : w.sequence) {
    ASSERT_EQ(pt.family.size(), 2u);
    // One vector is [2, 4x2] and the other [2, 0], in either order.
    const double x2 = pt.x(1);
    const bool a = (pt.family[0] - vec({2, 4 * x2})).norm() <= 1e-8 && (pt.family[1] - vec({2, 0})).norm() <= 1e-8;
    const bool b = (pt.family[1] - vec({2, 4 * x2})).norm() <= 1e-8 && (pt.family[0] - vec({2, 0})).norm() <= 1e-8;
    EXPECT_TRUE(a || b) << pt.family[0].transpose() << " | " << pt.family[1].transpose();
  }
  EXPECT_EQ(run("ex-3.2", CqKind::WeakCpld).status, CqStatus::NoViolationFound);
}

TEST(WeakCq, Ex33Holds) {
  EXPECT_EQ(run("ex-3.3", CqKind::WeakCrcq).status, CqStatus::NoViolationFound);
  EXPECT_EQ(run("ex-3.3", CqKind::WeakCpld).status, CqStatus::NoViolationFound);
}

TEST(WeakCq, BudgetIsValidated) {
  const auto& f = fixture("ex-3.3");
  CqOptions o = f.cq_options({});
  o.budget.levels = 4;
  EXPECT_THROW(check_weak_cq(f.problem(), f.point(), CqKind::WeakCrcq, o), Error);
  EXPECT_THROW(check_weak_cq(f.problem(), f.point(), CqKind::SeqCrcq, {}), Error);
}

TEST(SeqCq, Ex41RegisteredCurve) {
  const CqVerdict v = run("ex-4.1", CqKind::SeqCrcq);
  ASSERT_EQ(v.status, CqStatus::Violated);
  EXPECT_EQ(v.witness->source, "curve:ex4.1-delta");
  std::string why;
  EXPECT_TRUE(replay_witness(fixture("ex-4.1").problem(), v, &why)) << why;
  EXPECT_EQ(run("ex-4.1", CqKind::WeakCrcq).status, CqStatus::NoViolationFound);
}

TEST(SeqCq, DiagXXAndEx43Hold) {
  EXPECT_EQ(run("ex-4.2", CqKind::SeqCrcq).status, CqStatus::NoViolationFound);
  EXPECT_EQ(run("ex-4.3", CqKind::SeqCrcq).status, CqStatus::NoViolationFound);
}

TEST(SeqCq, Ex43OppositeDiagonal) {
  const NsdpProblem p = fixture("ex-4.3").problem();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int t = 0; t < 64; ++t) {
    const VFamily v = v_family(p, vec({u(rng), u(rng)}), testing::random_orthogonal(2, rng));
    EXPECT_LE((v.at(0, 0) + v.at(1, 1)).norm(), 1e-14);
    EXPECT_GT(v.at(0, 0).norm(), 0.5);
  }
}

TEST(SeparatingPerturbation, PrescribedSmallEigenvalues) {
  const NsdpProblem p = fixture("ex-3.1").problem();
  const EigBasis e{Mat::Identity(2, 2), 0};
  const Mat none(2, 0);
  const Vec x = vec({0.1});
  const SymMat d = separating_perturbation(p, x, vec({0}), e, none);
  const SpectralDecomp s = spectral_decompose(p.g_eval(x) + d);
  EXPECT_NEAR(s.values(0), 0.2, 1e-12);
  EXPECT_NEAR(s.values(1), 0.1, 1e-12);
  // The first column of E carries the larger separated eigenvalue.
  EXPECT_NEAR(std::abs(s.vectors.col(0).dot(e.cols.col(0))), 1.0, 1e-12);
  EXPECT_THROW(separating_perturbation(p, vec({0}), vec({0}), e, none), Error);
}

TEST(SeparatingPerturbation, VanishesAtThePoint) {
  const NsdpProblem p = fixture("ex-3.3").problem();
  const auto e = eig_basis_smallest(p.g_eval(vec({0})), 0);
  double prev = 1e300;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double n = separating_perturbation(p, vec({t}), vec({0}), *e, Mat(2, 0)).fro();
    EXPECT_LT(n, prev);
    prev = n;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Msr, Ex43ModulusOne) {
  const auto& f = fixture("ex-4.3");
  const MsrEstimate e = estimate_msr_modulus(f.problem(), f.point(), 0.1, 50, 1);
  EXPECT_FALSE(e.unreliable);
  EXPECT_NEAR(e.gamma_hat, 1.0, 0.01);
  for (const auto& s : e.samples) {
    EXPECT_TRUE(std::isfinite(s.ratio));
    EXPECT_GE(s.ratio, 0.0);
  }
}

TEST(Msr, InteriorHasNoInfeasibleSamples) {
  const auto& f = fixture("interior");
  const MsrEstimate e = estimate_msr_modulus(f.problem(), f.point(), 0.1, 20, 1);
  EXPECT_TRUE(e.no_infeasible_samples);
  EXPECT_EQ(e.gamma_hat, 0.0);
}

TEST(Msr, Ex31RatioGrowsTowardThePoint) {
  const CqVerdict v = run("ex-3.1", CqKind::Msr);
  EXPECT_EQ(v.status, CqStatus::Violated);
  ASSERT_FALSE(v.msr.empty());
  EXPECT_LT(v.msr.front().trend_slope, 0.0);
}

TEST(Implications, ClosureAndConflicts) {
  EXPECT_TRUE(implies(CqKind::Nondegeneracy, CqKind::WeakCpld));
  EXPECT_TRUE(implies(CqKind::Robinson, CqKind::Msr));
  EXPECT_FALSE(implies(CqKind::WeakCpld, CqKind::Nondegeneracy));
  EXPECT_FALSE(implies(CqKind::WeakCrcq, CqKind::Msr));

  std::map<CqKind, CqStatus> ok = {{CqKind::Robinson, CqStatus::Violated},
                                   {CqKind::WeakCpld, CqStatus::NoViolationFound}};
  EXPECT_TRUE(implication_conflicts(ok).empty());
  std::map<CqKind, CqStatus> bad = {{CqKind::Robinson, CqStatus::CertifiedHolds},
                                    {CqKind::WeakCpld, CqStatus::Violated}};
  const auto c = implication_conflicts(bad);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].stronger, CqKind::Robinson);
  EXPECT_EQ(c[0].weaker, CqKind::WeakCpld);
}

TEST(Implications, ExpectedTablesAreConsistent) {
  for (const auto& f : cli::builtin_fixtures()) {
    std::map<CqKind, CqStatus> t;
    for (const auto& [k, s] : f.file.meta.expected) t[*cq_kind_from_string(k)] = *cq_status_from_string(s);
    EXPECT_TRUE(implication_conflicts(t).empty()) << f.name;
  }
}

TEST(NlpCq, SamplerVerdicts) {
  const auto& pinch = fixture("nlp-pinch");
  EXPECT_EQ(check_nlp_cq(pinch.nlp_constraints(), pinch.point(), true).status, CqStatus::Violated);
  const auto& opp = fixture("nlp-opposite");
  EXPECT_EQ(check_nlp_cq(opp.nlp_constraints(), opp.point(), false).status, CqStatus::NoViolationFound);
  const auto& par = fixture("nlp-parabola");
  EXPECT_EQ(check_nlp_cq(par.nlp_constraints(), par.point(), false).status, CqStatus::Violated);
  EXPECT_EQ(check_nlp_cq(par.nlp_constraints(), par.point(), true).status, CqStatus::NoViolationFound);
}

TEST(Verdicts, Deterministic) {
  const std::string a = verdict_to_json(run("ex-3.2", CqKind::WeakCrcq));
  const std::string b = verdict_to_json(run("ex-3.2", CqKind::WeakCrcq));
  EXPECT_EQ(a, b);
}

TEST(Verdicts, JsonRoundTripKeepsReplay) {
  for (const auto& [fx, kind] : std::vector<std::pair<std::string, CqKind>>{
           {"ex-3.1", CqKind::WeakCpld}, {"ex-3.2", CqKind::WeakCrcq}, {"ex-4.3", CqKind::Msr}}) {
    const CqVerdict v = run(fx, kind);
    const std::string text = verdict_to_json(v);
    const CqVerdict back = verdict_from_json(text);
    EXPECT_EQ(back.kind, v.kind);
    EXPECT_EQ(back.status, v.status);
    EXPECT_EQ(back.rank, v.rank);
    EXPECT_EQ(verdict_to_json(back), text) << fx;
    if (back.status == CqStatus::Violated) {
      std::string why;
      EXPECT_TRUE(replay_witness(fixture(fx).problem(), back, &why)) << why;
    }
  }
}

TEST(Verdicts, TamperedWitnessFailsReplay) {
  CqVerdict v = run("ex-3.1", CqKind::WeakCpld);
  ASSERT_TRUE(v.witness.has_value());
  v.witness->sequence.front().family.front() *= -3.0;
  EXPECT_FALSE(replay_witness(fixture("ex-3.1").problem(), v));
}

TEST(Names, RoundTrip) {
  for (CqKind k : all_cq_kinds()) EXPECT_EQ(cq_kind_from_string(to_string(k)), k);
  for (CqStatus s : {CqStatus::CertifiedHolds, CqStatus::NoViolationFound, CqStatus::Violated})
    EXPECT_EQ(cq_status_from_string(to_string(s)), s);
  EXPECT_FALSE(cq_kind_from_string("licq").has_value());
}

}  // namespace
}  // namespace nsdp
