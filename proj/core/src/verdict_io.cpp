#include "nsdp/verdict_io.hpp"

#include "nsdp/errors.hpp"

#include <json.hpp>

namespace nsdp {

using json = nlohmann::json;

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Mat json_mat(const json& j) {
  const int r = j.at("rows").get<int>();
  const int c = j.at("cols").get<int>();
  Mat m(r, c);
  const json& data = j.at("data");
  if (static_cast<int>(data.size()) != r) throw Error("verdict: matrix row count mismatch");
  for (int i = 0; i < r; ++i) {
    const Vec row = json_vec(data[i]);
    if (row.size() != c) throw Error("verdict: matrix column count mismatch");
    m.row(i) = row.transpose();
  }
  return m;
}

json family_json(const std::vector<Vec>& f) {
  json a = json::array();
  for (const Vec& v : f) a.push_back(vec_json(v));
  return a;
}

std::vector<Vec> json_family(const json& j) {
  std::vector<Vec> f;
  for (const auto& v : j) f.push_back(json_vec(v));
  return f;
}

json tol_json(const Tolerances& t) {
  return {{"rank_rel", t.rank_rel}, {"zero_abs", t.zero_abs},         {"pld", t.pld},
          {"orth_per_dim", t.orth_per_dim}, {"recon_rel", t.recon_rel}, {"psd_rel", t.psd_rel},
          {"comp_rel", t.comp_rel}};
}

Tolerances json_tol(const json& j) {
  Tolerances t;
  t.rank_rel = j.at("rank_rel");
  t.zero_abs = j.at("zero_abs");
  t.pld = j.at("pld");
  t.orth_per_dim = j.at("orth_per_dim");
  t.recon_rel = j.at("recon_rel");
  t.psd_rel = j.at("psd_rel");
  t.comp_rel = j.at("comp_rel");
  return t;
}

json budget_json(const CqBudget& b) {
  return {{"n_q", b.n_q},
          {"t0", b.t0},
          {"levels", b.levels},
          {"random_directions", b.random_directions},
          {"sequence_hits", b.sequence_hits},
          {"robinson_iters", b.robinson_iters},
          {"robinson_restarts", b.robinson_restarts},
          {"zero_search_starts", b.zero_search_starts},
          {"perturbation_samples", b.perturbation_samples},
          {"neighborhood_random_directions", b.neighborhood_random_directions},
          {"msr_samples", b.msr_samples},
          {"msr_radius", b.msr_radius},
          {"msr_shrink", b.msr_shrink},
          {"msr_growth", b.msr_growth},
          {"max_kernel_dim", b.max_kernel_dim},
          {"seed", b.seed}};
}

CqBudget json_budget(const json& j) {
  CqBudget b;
  b.n_q = j.at("n_q");
  b.t0 = j.at("t0");
  b.levels = j.at("levels");
  b.random_directions = j.at("random_directions");
  b.sequence_hits = j.at("sequence_hits");
  b.robinson_iters = j.at("robinson_iters");
  b.robinson_restarts = j.at("robinson_restarts");
  b.zero_search_starts = j.at("zero_search_starts");
  b.perturbation_samples = j.at("perturbation_samples");
  b.neighborhood_random_directions = j.at("neighborhood_random_directions");
  b.msr_samples = j.at("msr_samples");
  b.msr_radius = j.at("msr_radius");
  b.msr_shrink = j.at("msr_shrink");
  b.msr_growth = j.at("msr_growth");
  b.max_kernel_dim = j.at("max_kernel_dim");
  b.seed = j.at("seed");
  return b;
}

json witness_json(const Witness& w) {
  json seq = json::array();
  for (const WitnessPoint& p : w.sequence)
    seq.push_back({{"t", p.t},
                   {"x", vec_json(p.x)},
                   {"Delta", p.delta.dim() > 0 ? json(p.delta.upper()) : json::array()},
                   {"E", mat_json(p.e)},
                   {"family", family_json(p.family)},
                   {"dependent", p.dependent}});
  return {{"kind", w.kind},
          {"source", w.source},
          {"dependence", w.dependence},
          {"family", w.family},
          {"x_bar", vec_json(w.x_bar)},
          {"E_bar", mat_json(w.e_bar)},
          {"subset", w.subset},
          {"family_at_bar", family_json(w.family_at_bar)},
          {"bar_dependent", w.bar_dependent},
          {"weights", vec_json(w.weights)},
          {"direction", vec_json(w.direction)},
          {"value", w.value},
          {"sequence", seq}};
}

Witness json_witness(const json& j) {
  Witness w;
  w.kind = j.at("kind");
  w.source = j.at("source");
  w.dependence = j.at("dependence");
  w.family = j.at("family");
  w.x_bar = json_vec(j.at("x_bar"));
  w.e_bar = json_mat(j.at("E_bar"));
  w.subset = j.at("subset").get<std::vector<int>>();
  w.family_at_bar = json_family(j.at("family_at_bar"));
  w.bar_dependent = j.at("bar_dependent");
  w.weights = json_vec(j.at("weights"));
  w.direction = json_vec(j.at("direction"));
  w.value = j.at("value");
  for (const auto& s : j.at("sequence")) {
    WitnessPoint p;
    p.t = s.at("t");
    p.x = json_vec(s.at("x"));
    const auto d = s.at("Delta").get<std::vector<double>>();
    if (!d.empty()) {
      int m = 0;
      while (static_cast<size_t>(m * (m + 1) / 2) < d.size()) ++m;
      p.delta = SymMat::from_upper_list(m, d);
    }
    p.e = json_mat(s.at("E"));
    p.family = json_family(s.at("family"));
    p.dependent = s.at("dependent");
    w.sequence.push_back(std::move(p));
  }
  return w;
}

json msr_json(const MsrEstimate& e) {
  json samples = json::array();
  for (const MsrSample& s : e.samples)
    samples.push_back({{"x", vec_json(s.x)},
                       {"infeasibility", s.infeasibility},
                       {"dist", s.dist},
                       {"ratio", s.ratio},
                       {"counted", s.counted},
                       {"solve_ok", s.solve_ok},
                       {"note", s.note}});
  return {{"radius", e.radius},
          {"gamma_hat", e.gamma_hat},
          {"failures", e.failures},
          {"no_infeasible_samples", e.no_infeasible_samples},
          {"unreliable", e.unreliable},
          {"trend_slope", e.trend_slope},
          {"trend_growth", e.trend_growth},
          {"trend_bins", e.trend_bins},
          {"samples", samples}};
}

MsrEstimate json_msr(const json& j) {
  MsrEstimate e;
  e.radius = j.at("radius");
  e.gamma_hat = j.at("gamma_hat");
  e.failures = j.at("failures");
  e.no_infeasible_samples = j.at("no_infeasible_samples");
  e.unreliable = j.at("unreliable");
  e.trend_slope = j.at("trend_slope");
  e.trend_growth = j.at("trend_growth");
  e.trend_bins = j.at("trend_bins");
  for (const auto& s : j.at("samples")) {
    MsrSample m;
    m.x = json_vec(s.at("x"));
    m.infeasibility = s.at("infeasibility");
    m.dist = s.at("dist");
    m.ratio = s.at("ratio");
    m.counted = s.at("counted");
    m.solve_ok = s.at("solve_ok");
    m.note = s.at("note");
    e.samples.push_back(std::move(m));
  }
  return e;
}

}  // namespace

std::string verdict_to_json(const CqVerdict& v, int indent) {
  json j{{"format", "nsdp-verdict/1"},
         {"condition", to_string(v.kind)},
         {"status", to_string(v.status)},
         {"rank", v.rank},
         {"n", v.n},
         {"m", v.m},
         {"x_bar", vec_json(v.x_bar)},
         {"tolerances", tol_json(v.tol)},
         {"budget", budget_json(v.budget)},
         {"seed", v.budget.seed},
         {"note", v.note},
         {"witness", v.witness ? witness_json(*v.witness) : json(nullptr)}};
  if (!v.msr.empty()) {
    json a = json::array();
    for (const auto& e : v.msr) a.push_back(msr_json(e));
    j["msr"] = a;
  }
  return j.dump(indent);
}

CqVerdict verdict_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("verdict: ") + e.what(), 1, static_cast<int>(e.byte));
  }
  try {
    if (j.at("format") != "nsdp-verdict/1") throw Error("verdict: unknown format");
    CqVerdict v;
    const auto kind = cq_kind_from_string(j.at("condition"));
    const auto status = cq_status_from_string(j.at("status"));
    if (!kind || !status) throw Error("verdict: unknown condition or status");
    v.kind = *kind;
    v.status = *status;
    v.rank = j.at("rank");
    v.n = j.at("n");
    v.m = j.at("m");
    v.x_bar = json_vec(j.at("x_bar"));
    v.tol = json_tol(j.at("tolerances"));
    v.budget = json_budget(j.at("budget"));
    v.note = j.at("note");
    if (!j.at("witness").is_null()) v.witness = json_witness(j.at("witness"));
    if (j.contains("msr"))
      for (const auto& e : j.at("msr")) v.msr.push_back(json_msr(e));
    return v;
  } catch (const json::exception& e) {
    throw Error(std::string("verdict: malformed document: ") + e.what());
  }
}

}  // namespace nsdp
