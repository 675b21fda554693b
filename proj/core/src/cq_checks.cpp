#include "cq_internal.hpp"

#include "nsdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace nsdp {

using namespace cq_detail;

namespace {

CqVerdict certified_full_rank(const Base& b, CqKind kind, const CqOptions& opt) {
  CqVerdict v = blank_verdict(b, kind, opt);
  v.status = CqStatus::CertifiedHolds;
  v.note = "r = m: G(x̄) is positive definite";
  return v;
}

double robinson_value(const Base& b, const Vec& d, Vec* subgrad) {
  const SpectralDecomp dec = spectral_decompose(b.g + dg_apply(b.dg, d));
  if (subgrad) {
    const Vec u = dec.vectors.col(b.m - 1);
    subgrad->resize(b.n);
    for (int l = 0; l < b.n; ++l) (*subgrad)(l) = u.dot(b.dg[l].mat() * u);
  }
  return dec.values(b.m - 1);
}

Vec ball_project(const Vec& d) {
  const double nrm = d.norm();
  return nrm > 1.0 ? Vec(d / nrm) : d;
}

// Orthonormal P spanning the complement of E, rotated by Rayleigh–Ritz on G(x).
Mat ritz_block(const SymMat& gx, const Mat& e) {
  const Mat pc = orthonormal_complement(e);
  if (pc.cols() == 0) return pc;
  const SpectralDecomp d = spectral_decompose(SymMat::from_upper(pc.transpose() * gx.mat() * pc));
  return pc * d.vectors;
}

}  // namespace

CqVerdict check_nondegeneracy(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt) {
  const Base b = make_base(p, x_bar, opt);
  if (b.k == 0) return certified_full_rank(b, CqKind::Nondegeneracy, opt);
  CqVerdict v = blank_verdict(b, CqKind::Nondegeneracy, opt);
  const std::vector<Vec> fam = v_family(p, x_bar, b.e0).upper();
  if (lin_dependent(fam, opt.tol)) {
    v.status = CqStatus::Violated;
    v.witness = dependent_family_witness(b, b.e0, fam, false, "full", opt.tol);
    v.note = "the full v_ij family is linearly dependent";
  } else {
    v.status = CqStatus::CertifiedHolds;
    v.note = "the full v_ij family is linearly independent";
  }
  return v;
}

CqVerdict check_robinson(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt) {
  const Base b = make_base(p, x_bar, opt);
  CqVerdict v = blank_verdict(b, CqKind::Robinson, opt);
  if (b.k == 0) {
    v.status = CqStatus::CertifiedHolds;
    Witness w;
    w.kind = "primal_direction";
    w.source = "interior";
    w.x_bar = b.x_bar;
    w.direction = Vec::Zero(b.n);
    w.value = b.dec.values(b.m - 1);
    v.witness = w;
    v.note = "r = m: d = 0 already maps into the interior";
    return v;
  }

  const double threshold = opt.tol.rank_rel * b.scale;
  auto rng = rng_for(opt.budget, 0x70b);
  Vec best_d = Vec::Zero(b.n);
  double best = -std::numeric_limits<double>::infinity();
  Vec grad;
  for (int rs = 0; rs < opt.budget.robinson_restarts && b.n > 0; ++rs) {
    Vec d = rs == 0 ? Vec(Vec::Zero(b.n)) : Vec(0.5 * random_unit(b.n, rng));
    for (int it = 1; it <= opt.budget.robinson_iters; ++it) {
      const double val = robinson_value(b, d, &grad);
      if (val > best) {
        best = val;
        best_d = d;
      }
      d = ball_project(d + grad / std::sqrt(static_cast<double>(it)));
    }
    const double val = robinson_value(b, d, nullptr);
    if (val > best) {
      best = val;
      best_d = d;
    }
    if (best > threshold) break;
  }
  if (best > threshold) {
    v.status = CqStatus::CertifiedHolds;
    Witness w;
    w.kind = "primal_direction";
    w.source = "subgradient-ascent";
    w.x_bar = b.x_bar;
    w.direction = best_d;
    w.value = best;
    v.witness = w;
    v.note = "λ_min(G(x̄) + DG(x̄)d) > 0 for the recorded d";
    return v;
  }

  for (const Mat& e : basis_candidates(b, opt, true)) {
    const std::vector<Vec> fam = v_diagonal(b.dg, e);
    if (pos_lin_dependent(fam, opt.tol)) {
      v.status = CqStatus::Violated;
      v.witness = dependent_family_witness(b, e, fam, true, "diagonal", opt.tol);
      v.note = "the diagonal family is positively linearly dependent at the recorded Ē";
      return v;
    }
  }
  v.status = CqStatus::NoViolationFound;
  v.note = "no certificate above ε_rank and no positively dependent basis found";
  return v;
}

CqVerdict check_weak_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind, const CqOptions& opt) {
  if (kind != CqKind::WeakNondegeneracy && kind != CqKind::WeakRobinson &&
      kind != CqKind::WeakCrcq && kind != CqKind::WeakCpld)
    throw Error(std::string("check_weak_cq: not a weak condition: ") + to_string(kind));
  const Base b = make_base(p, x_bar, opt);
  if (b.k == 0) return certified_full_rank(b, kind, opt);
  CqVerdict v = blank_verdict(b, kind, opt);
  const Rule rule = rule_for(kind);
  const std::vector<Mat> cands = basis_candidates(b, opt, true);
  const std::vector<Vec> dirs = direction_dictionary(b, opt, opt.budget.random_directions, 0xd1);
  for (size_t i = 0; i < dirs.size(); ++i) {
    const auto lv = build_levels(p, b, dirs[i], opt.budget);
    if (auto w = sequence_violation(b, lv, cands, rule, opt, "direction")) {
      v.status = CqStatus::Violated;
      v.witness = std::move(w);
      v.note = "every reachable limit basis fails along direction #" + std::to_string(i);
      return v;
    }
  }
  v.status = CqStatus::NoViolationFound;
  v.note = "no violating sequence among " + std::to_string(dirs.size()) + " directions";
  return v;
}

CqVerdict check_seq_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind, const CqOptions& opt) {
  if (kind != CqKind::SeqCrcq && kind != CqKind::SeqCpld)
    throw Error(std::string("check_seq_cq: not a sequential condition: ") + to_string(kind));
  const Base b = make_base(p, x_bar, opt);
  if (b.k == 0) return certified_full_rank(b, kind, opt);
  CqVerdict v = blank_verdict(b, kind, opt);
  const Rule rule = rule_for(kind);
  const std::vector<Mat> cands = basis_candidates(b, opt, true);

  // Registered perturbation curves.
  for (const DeltaCurve& c : opt.curves) {
    if (c.n != b.n || c.m != b.m || c.direction.size() != b.n) continue;
    const auto lv = build_levels(p, b, c.direction, opt.budget, c.delta);
    if (auto w = sequence_violation(b, lv, cands, rule, opt, "curve:" + c.name)) {
      v.status = CqStatus::Violated;
      v.witness = std::move(w);
      v.note = "registered perturbation curve " + c.name;
      return v;
    }
  }

  // Δ = 0 reduces the sequential definition to the weak one.
  const CqKind weak = kind == CqKind::SeqCrcq ? CqKind::WeakCrcq : CqKind::WeakCpld;
  const std::vector<Vec> dirs = direction_dictionary(b, opt, opt.budget.random_directions, 0xd1);
  std::vector<Mat> limits;
  for (const Vec& d : dirs) {
    const auto lv = build_levels(p, b, d, opt.budget);
    if (auto w = sequence_violation(b, lv, cands, rule_for(weak), opt, "direction")) {
      v.status = CqStatus::Violated;
      v.witness = std::move(w);
      v.note = "Δ^k = 0 sequence";
      return v;
    }
    limits.push_back(canonical_limit(b, lv));
  }

  // Neighborhood form: (x, E) → (x̄, Ē) with E = polar(Ē + tZ).
  std::vector<Mat> bars = cands;
  bars.insert(bars.end(), limits.begin(), limits.end());
  const std::vector<Vec> nb_dirs =
      direction_dictionary(b, opt, opt.budget.neighborhood_random_directions, 0x4b);
  auto zrng = rng_for(opt.budget, 0x2a);
  std::vector<Mat> zs{Mat::Zero(b.m, b.k)};
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < opt.budget.perturbation_samples; ++i) {
    Mat z(b.m, b.k);
    for (int c = 0; c < b.k; ++c)
      for (int r = 0; r < b.m; ++r) z(r, c) = gauss(zrng);
    zs.push_back(z / z.norm());
  }
  const int hits = opt.budget.sequence_hits;
  const int nl = opt.budget.levels;
  const auto all_subsets = subsets(b.k);
  for (const Mat& ebar : bars) {
    const std::vector<Vec> bar = v_diagonal(b.dg, ebar);
    std::vector<std::vector<int>> js;
    for (const auto& j : all_subsets)
      if (dependent(pick(bar, j), rule.positive, opt.tol)) js.push_back(j);
    if (js.empty()) continue;
    for (const Vec& d : nb_dirs)
      for (const Mat& z : zs) {
        std::vector<std::vector<Vec>> tail;
        for (int k = nl - hits; k < nl; ++k) {
          const double t = opt.budget.t0 * std::ldexp(1.0, -k);
          tail.push_back(v_diagonal(p.dg_eval(b.x_bar + t * d), polar_factor(ebar + t * z)));
        }
        for (const auto& j : js) {
          const bool li = std::none_of(tail.begin(), tail.end(), [&](const auto& fam) {
            return lin_dependent(pick(fam, j), opt.tol);
          });
          if (!li) continue;
          Witness w;
          w.kind = "sequence";
          w.source = "neighborhood";
          w.dependence = rule.positive ? "positive" : "linear";
          w.x_bar = b.x_bar;
          w.e_bar = ebar;
          w.subset = j;
          w.family_at_bar = pick(bar, j);
          w.bar_dependent = true;
          if (rule.positive) {
            if (auto wt = positive_dependence_weights(w.family_at_bar, opt.tol)) w.weights = *wt;
          } else {
            w.weights = null_combination(w.family_at_bar);
          }
          w.direction = d;
          for (int k = 0; k < nl; ++k) {
            WitnessPoint pt;
            pt.t = opt.budget.t0 * std::ldexp(1.0, -k);
            pt.x = b.x_bar + pt.t * d;
            pt.e = polar_factor(ebar + pt.t * z);
            const SymMat gx = p.g_eval(pt.x);
            pt.delta = separating_perturbation(p, pt.x, b.x_bar, EigBasis{pt.e, b.r},
                                               ritz_block(gx, pt.e), opt.tol);
            pt.family = pick(v_diagonal(p.dg_eval(pt.x), pt.e), j);
            pt.dependent = lin_dependent(pt.family, opt.tol);
            w.sequence.push_back(std::move(pt));
          }
          v.status = CqStatus::Violated;
          v.witness = std::move(w);
          v.note = "neighborhood sample with the separating perturbation";
          return v;
        }
      }
  }
  v.status = CqStatus::NoViolationFound;
  v.note = "no violation among " + std::to_string(bars.size()) + " limit bases";
  return v;
}

CqVerdict check_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind, const CqOptions& opt) {
  switch (kind) {
    case CqKind::Nondegeneracy: return check_nondegeneracy(p, x_bar, opt);
    case CqKind::Robinson: return check_robinson(p, x_bar, opt);
    case CqKind::WeakNondegeneracy:
    case CqKind::WeakRobinson:
    case CqKind::WeakCrcq:
    case CqKind::WeakCpld: return check_weak_cq(p, x_bar, kind, opt);
    case CqKind::SeqCrcq:
    case CqKind::SeqCpld: return check_seq_cq(p, x_bar, kind, opt);
    case CqKind::Msr: return check_msr(p, x_bar, opt);
  }
  throw Error("check_cq: unknown condition");
}

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool same_vectors(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    if ((a[i] - b[i]).norm() > 1e-9 * (1.0 + b[i].norm())) return false;
  }
  return true;
}

}  // namespace

bool replay_witness(const NsdpProblem& p, const CqVerdict& v, std::string* why) {
  if (!v.witness) {
    if (v.status == CqStatus::Violated) return fail(why, "VIOLATED verdict without a witness");
    return true;
  }
  const Witness& w = *v.witness;
  const Tolerances& tol = v.tol;

  if (w.kind == "primal_direction") {
    const SymMat m = p.g_eval(w.x_bar) + dg_apply(p, w.x_bar, w.direction);
    const double lm = lambda_min(m);
    if (std::abs(lm - w.value) > 1e-9 * (1.0 + std::abs(w.value)))
      return fail(why, "λ_min along the certificate direction does not reproduce");
    if (w.direction.norm() > 1.0 + 1e-12) return fail(why, "certificate direction leaves the unit ball");
    return true;
  }

  if (w.kind == "msr_ratio") {
    for (const WitnessPoint& pt : w.sequence) {
      if (pt.family.size() != 1 || pt.family[0].size() != 2)
        return fail(why, "malformed MSR sample");
      const double infeas = proj_psd(-p.g_eval(pt.x)).fro();
      const double dist = pt.family[0](0);
      if (std::abs(infeas - pt.family[0](1)) > 1e-9 * (1.0 + infeas))
        return fail(why, "MSR infeasibility does not reproduce");
      if (dist > (pt.x - w.x_bar).norm() + 1e-12) return fail(why, "MSR distance above the x̄ bound");
    }
    return true;
  }

  const bool positive = w.dependence == "positive";
  std::vector<Vec> bar;
  if (w.family == "full") {
    bar = v_family(p, w.x_bar, w.e_bar).upper();
  } else {
    bar = pick(v_diagonal(p.dg_eval(w.x_bar), w.e_bar), w.subset);
  }
  if (w.family == "full" && w.subset.size() != bar.size()) return fail(why, "subset size mismatch");
  if (!same_vectors(bar, w.family_at_bar)) return fail(why, "family at x̄ does not reproduce");
  if (dependent(bar, positive, tol) != w.bar_dependent)
    return fail(why, "dependence of the family at x̄ flipped");
  // Ē must lie in E_r(G(x̄)).
  const SymMat gbar = p.g_eval(w.x_bar);
  const int k = static_cast<int>(w.e_bar.cols());
  if ((w.e_bar.transpose() * w.e_bar - Mat::Identity(k, k)).norm() > tol.eps_orth(p.m) * 10.0)
    return fail(why, "Ē is not column-orthonormal");
  if ((gbar.mat() * w.e_bar).norm() > 1e-6 * (1.0 + gbar.fro()))
    return fail(why, "Ē does not span part of ker G(x̄)");
  if (w.kind == "dependent_family") return true;

  if (w.kind != "sequence") return fail(why, "unknown witness kind " + w.kind);
  const int hits = std::min<int>(v.budget.sequence_hits, static_cast<int>(w.sequence.size()));
  for (size_t i = 0; i < w.sequence.size(); ++i) {
    const WitnessPoint& pt = w.sequence[i];
    const SymMat mk = p.g_eval(pt.x) + pt.delta;
    const Mat& e = pt.e;
    const Mat me = mk.mat() * e;
    const Vec ritz = (e.transpose() * me).diagonal();
    if ((me - e * ritz.asDiagonal()).norm() > 1e-8 * (1.0 + mk.fro()))
      return fail(why, "sequence basis is not an eigenbasis of G(x)+Δ at level " + std::to_string(i));
    const std::vector<Vec> fam = pick(v_diagonal(p.dg_eval(pt.x), e), w.subset);
    if (!same_vectors(fam, pt.family)) return fail(why, "sequence family does not reproduce");
    const bool dep = lin_dependent(fam, tol);
    if (dep != pt.dependent) return fail(why, "dependence bit flipped at level " + std::to_string(i));
    if (w.family != "full" && static_cast<int>(i) >= static_cast<int>(w.sequence.size()) - hits &&
        dep && v.kind != CqKind::WeakNondegeneracy && v.kind != CqKind::WeakRobinson)
      return fail(why, "tail level is not independent");
  }
  return true;
}

NlpCqResult check_nlp_cq(const std::vector<ScalarConstraint>& g, const Vec& x_bar, bool positive,
                         const CqOptions& opt) {
  NlpCqResult out;
  const int n = static_cast<int>(x_bar.size());
  double gmax = 0.0;
  for (const auto& c : g) gmax = std::max(gmax, std::abs(c.value(x_bar)));
  for (size_t i = 0; i < g.size(); ++i) {
    const double gi = g[i].value(x_bar);
    if (gi < -opt.tol.eps_psd(gmax)) throw InfeasiblePointError("check_nlp_cq: x̄ infeasible", -gi);
    if (gi <= opt.tol.rank_rel * std::max(1.0, gmax)) out.active.push_back(static_cast<int>(i));
  }
  if (out.active.empty()) {
    out.status = CqStatus::CertifiedHolds;
    return out;
  }
  auto grads = [&](const Vec& x) {
    std::vector<Vec> v;
    for (int i : out.active) v.push_back(g[i].gradient(x));
    return v;
  };
  const std::vector<Vec> bar = grads(x_bar);
  Base b;
  b.n = n;
  b.x_bar = x_bar;
  const auto dirs = direction_dictionary(b, opt, opt.budget.random_directions, 0xd1);
  const int nl = opt.budget.levels;
  const int hits = opt.budget.sequence_hits;
  const auto js = subsets(static_cast<int>(out.active.size()));
  for (const Vec& d : dirs) {
    std::vector<std::vector<Vec>> tail;
    for (int k = nl - hits; k < nl; ++k)
      tail.push_back(grads(x_bar + opt.budget.t0 * std::ldexp(1.0, -k) * d));
    for (const auto& j : js) {
      if (!dependent(pick(bar, j), positive, opt.tol)) continue;
      const bool li = std::none_of(tail.begin(), tail.end(), [&](const auto& fam) {
        return lin_dependent(pick(fam, j), opt.tol);
      });
      if (li) {
        out.status = CqStatus::Violated;
        for (int i : j) out.subset.push_back(out.active[i]);
        out.direction = d;
        return out;
      }
    }
  }
  out.status = CqStatus::NoViolationFound;
  return out;
}

const std::vector<std::pair<CqKind, CqKind>>& implication_edges() {
  using K = CqKind;
  static const std::vector<std::pair<K, K>> e = {
      {K::Nondegeneracy, K::Robinson},       {K::Nondegeneracy, K::SeqCrcq},
      {K::Nondegeneracy, K::WeakNondegeneracy}, {K::Robinson, K::Msr},
      {K::Robinson, K::SeqCpld},             {K::Robinson, K::WeakRobinson},
      {K::SeqCrcq, K::SeqCpld},              {K::SeqCrcq, K::WeakCrcq},
      {K::SeqCpld, K::WeakCpld},             {K::SeqCpld, K::Msr},
      {K::WeakNondegeneracy, K::WeakCrcq},   {K::WeakNondegeneracy, K::WeakRobinson},
      {K::WeakRobinson, K::WeakCpld},        {K::WeakCrcq, K::WeakCpld}};
  return e;
}

bool implies(CqKind stronger, CqKind weaker) {
  if (stronger == weaker) return false;
  std::vector<CqKind> stack{stronger};
  std::set<CqKind> seen;
  while (!stack.empty()) {
    const CqKind k = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : implication_edges()) {
      if (a != k || !seen.insert(b).second) continue;
      if (b == weaker) return true;
      stack.push_back(b);
    }
  }
  return false;
}

std::vector<ImplicationConflict> implication_conflicts(const std::map<CqKind, CqStatus>& verdicts) {
  std::vector<ImplicationConflict> out;
  for (const auto& [weak, ws] : verdicts) {
    if (ws != CqStatus::Violated) continue;
    for (const auto& [strong, ss] : verdicts)
      if (ss != CqStatus::Violated && implies(strong, weak)) out.push_back({strong, weak, ss});
  }
  return out;
}

}  // namespace nsdp
