#include "cq_internal.hpp"

#include "nsdp/errors.hpp"

#include <cmath>

namespace nsdp::cq_detail {

std::vector<Level> build_levels(const NsdpProblem& p, const Base& b, const Vec& dir,
                                const CqBudget& budget, const DeltaFn& delta) {
  if (budget.levels < 8 || budget.levels > 20)
    throw Error("cq: shrink depth must lie in [8, 20], got " + std::to_string(budget.levels));
  if (budget.sequence_hits < 1 || budget.sequence_hits > budget.levels)
    throw Error("cq: sequence_hits must lie in [1, levels]");
  std::vector<Level> lv;
  lv.reserve(static_cast<size_t>(budget.levels));
  for (int k = 0; k < budget.levels; ++k) {
    Level l;
    l.t = budget.t0 * std::ldexp(1.0, -k);
    l.x = b.x_bar + l.t * dir;
    SymMat mk = p.g_eval(l.x);
    l.delta = delta ? delta(l.x) : SymMat::zero(b.m);
    mk += l.delta;
    l.dec = spectral_decompose(mk);
    l.dg = p.dg_eval(l.x);
    lv.push_back(std::move(l));
  }
  return lv;
}

Mat canonical_limit(const Base& b, const std::vector<Level>& lv) {
  const size_t last = lv.size() - 1;
  const Mat ek = eig_basis_smallest(lv[last].dec, b.r)->cols;
  const Mat ek1 = closest_in_er(lv[last - 1].dec, b.r, ek);
  const Mat ek2 = closest_in_er(lv[last - 2].dec, b.r, ek1);
  // Halving steps: 8E(t) − 6E(2t) + E(4t) cancels the first two Taylor terms.
  const Mat rich = (8.0 * ek - 6.0 * ek1 + ek2) / 3.0;
  return project_to_span(b.e0, rich);
}

Rule rule_for(CqKind kind) {
  switch (kind) {
    case CqKind::WeakNondegeneracy: return {false, true};
    case CqKind::WeakRobinson: return {true, true};
    case CqKind::WeakCrcq:
    case CqKind::SeqCrcq: return {false, false};
    case CqKind::WeakCpld:
    case CqKind::SeqCpld: return {true, false};
    default: throw Error(std::string("cq: no sequence rule for ") + to_string(kind));
  }
}

CandidateEval evaluate_candidate(const Base& b, const std::vector<Level>& lv, const Mat& c,
                                 Rule rule, const CqOptions& opt) {
  CandidateEval out;
  const int nl = static_cast<int>(lv.size());
  std::vector<double> dist(static_cast<size_t>(nl));
  out.es.reserve(static_cast<size_t>(nl));
  for (int k = 0; k < nl; ++k) {
    out.es.push_back(closest_in_er(lv[k].dec, b.r, c));
    dist[k] = (out.es.back() - c).norm();
  }
  const double dk = dist[nl - 1];
  out.reachable = dk <= 1e-2 && (dk <= 1e-8 || dk <= 0.75 * dist[nl - 3]);
  if (!out.reachable) return out;

  const std::vector<Vec> bar = v_diagonal(b.dg, c);
  if (rule.full_only) {
    out.fails = dependent(bar, rule.positive, opt.tol);
    if (out.fails) out.subset = iota_subset(b.k);
    return out;
  }
  const int hits = opt.budget.sequence_hits;
  std::vector<std::vector<Vec>> tail;
  for (int k = nl - hits; k < nl; ++k) tail.push_back(v_diagonal(lv[k].dg, out.es[k]));
  for (const auto& j : subsets(b.k)) {
    if (!dependent(pick(bar, j), rule.positive, opt.tol)) continue;
    bool li_everywhere = true;
    for (const auto& fam : tail)
      if (lin_dependent(pick(fam, j), opt.tol)) {
        li_everywhere = false;
        break;
      }
    if (li_everywhere) {
      out.fails = true;
      out.subset = j;
      return out;
    }
  }
  return out;
}

std::optional<Witness> sequence_violation(const Base& b, const std::vector<Level>& lv,
                                          const std::vector<Mat>& candidates, Rule rule,
                                          const CqOptions& opt, const std::string& source) {
  std::vector<Mat> all;
  all.reserve(candidates.size() + 1);
  all.push_back(canonical_limit(b, lv));
  all.insert(all.end(), candidates.begin(), candidates.end());

  std::optional<std::pair<Mat, CandidateEval>> first_fail;
  int reachable = 0;
  for (const Mat& c : all) {
    CandidateEval ev = evaluate_candidate(b, lv, c, rule, opt);
    if (!ev.reachable) continue;
    ++reachable;
    if (!ev.fails) return std::nullopt;
    if (!first_fail) first_fail.emplace(c, std::move(ev));
  }
  if (reachable == 0 || !first_fail) return std::nullopt;

  const Mat& e_bar = first_fail->first;
  const CandidateEval& ev = first_fail->second;
  Witness w;
  w.kind = "sequence";
  w.source = source;
  w.dependence = rule.positive ? "positive" : "linear";
  w.x_bar = b.x_bar;
  w.e_bar = e_bar;
  w.subset = ev.subset;
  w.family_at_bar = pick(v_diagonal(b.dg, e_bar), ev.subset);
  w.bar_dependent = true;
  if (rule.positive) {
    if (auto wt = positive_dependence_weights(w.family_at_bar, opt.tol)) w.weights = *wt;
  } else {
    w.weights = null_combination(w.family_at_bar);
  }
  const Level& tail = lv.back();
  w.direction = (tail.x - b.x_bar) / tail.t;
  for (size_t k = 0; k < lv.size(); ++k) {
    WitnessPoint pt;
    pt.t = lv[k].t;
    pt.x = lv[k].x;
    pt.delta = lv[k].delta;
    pt.e = ev.es[k];
    pt.family = pick(v_diagonal(lv[k].dg, ev.es[k]), ev.subset);
    pt.dependent = lin_dependent(pt.family, opt.tol);
    w.sequence.push_back(std::move(pt));
  }
  return w;
}

std::vector<Mat> basis_candidates(const Base& b, const CqOptions& opt, bool with_q) {
  std::vector<Mat> out;
  out.push_back(b.e0);
  for (const Vec& z : zero_search(b, opt.budget)) out.push_back(complete_basis(b.e0, z));
  double phi = 0.0;
  const SymMat w = spectraplex_minimizer(b, 2000, &phi);
  out.push_back(b.e0 * spectral_decompose(w).vectors);
  if (with_q) {
    auto rng = rng_for(opt.budget, 0x51);
    for (int i = 0; i < opt.budget.n_q; ++i) out.push_back(b.e0 * haar_orthogonal(b.k, rng));
  }
  return out;
}

}  // namespace nsdp::cq_detail
