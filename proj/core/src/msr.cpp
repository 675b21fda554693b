#include "cq_internal.hpp"

#include "nsdp/errors.hpp"
#include "nsdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsdp {

namespace {

// min ‖z − x‖² s.t. G(z) ⪰ 0, sharing the constraint callbacks.
NsdpProblem projection_problem(const NsdpProblem& p, const Vec& x) {
  NsdpProblem q = p;
  q.name = p.name + "/projection";
  q.f = [x](const Vec& z) { return (z - x).squaredNorm(); };
  q.grad_f = [x](const Vec& z) { return Vec(2.0 * (z - x)); };
  return q;
}

double infeasibility(const NsdpProblem& p, const Vec& x) { return proj_psd(-p.g_eval(x)).fro(); }

constexpr int kTrendBins = 8;

void fit_trend(MsrEstimate& est, const Vec& x_bar) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& s : est.samples)
    if (s.counted) {
      const double r = (s.x - x_bar).norm();
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  if (!(hi > lo) || lo <= 0.0) return;
  std::vector<double> best(kTrendBins, 0.0);
  const double span = std::log(hi / lo);
  for (const auto& s : est.samples) {
    if (!s.counted || !(s.ratio > 0.0)) continue;
    const double u = std::log((s.x - x_bar).norm() / lo) / span;
    const int bin = std::min(kTrendBins - 1, static_cast<int>(u * kTrendBins));
    best[bin] = std::max(best[bin], s.ratio);
  }
  std::vector<std::pair<double, double>> pts;
  for (int b = 0; b < kTrendBins; ++b)
    if (best[b] > 0.0) pts.emplace_back(std::log(lo) + span * (b + 0.5) / kTrendBins, std::log(best[b]));
  est.trend_bins = static_cast<int>(pts.size());
  if (pts.size() < 3) return;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  est.trend_slope = sxy / sxx;
  est.trend_growth = std::exp(pts.front().second - pts.back().second);
}

}  // namespace

MsrEstimate estimate_msr_modulus(const NsdpProblem& p, const Vec& x_bar, double radius, int samples,
                                 std::uint64_t seed, const Tolerances& tol) {
  if (!(radius > 0.0)) throw Error("estimate_msr_modulus: radius must be positive");
  if (samples < 1) throw Error("estimate_msr_modulus: need at least one sample");
  if (x_bar.size() != p.n) throw DimensionError("estimate_msr_modulus: x̄ has the wrong length");
  const double bar_infeas = infeasibility(p, x_bar);
  if (bar_infeas > tol.eps_psd(p.g_eval(x_bar).fro()))
    throw InfeasiblePointError("estimate_msr_modulus: x̄ is infeasible", bar_infeas);

  MsrEstimate est;
  est.radius = radius;
  AlConfig cfg;
  cfg.inner_max_iter = 2000;
  int counted = 0;
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const Vec u = cq_detail::random_unit(p.n, rng);
    MsrSample smp;
    smp.x = x_bar + radius * (s + 0.5) / samples * u;
    smp.infeasibility = infeasibility(p, smp.x);
    smp.dist = (smp.x - x_bar).norm();
    smp.counted = smp.infeasibility > tol.rank_rel;
    if (!smp.counted) {
      smp.solve_ok = true;
      smp.note = "feasible within ε_rank";
      est.samples.push_back(std::move(smp));
      continue;
    }
    ++counted;
    const NsdpProblem proj = projection_problem(p, smp.x);
    const double accept = 1e-3 * smp.infeasibility + 1e-12;
    for (const Vec& start : {smp.x, x_bar}) {
      const SolverTrace tr = solve_augmented_lagrangian(proj, start, cfg, 1e-10, 40);
      if (tr.records.empty()) continue;
      const Vec& z = tr.last().x;
      const double feas = infeasibility(p, z);
      smp.note += (smp.note.empty() ? "" : "; ") + tr.termination;
      if (feas <= accept) {
        smp.solve_ok = true;
        smp.dist = std::min(smp.dist, (z - smp.x).norm());
      }
    }
    if (!smp.solve_ok) ++est.failures;
    smp.ratio = smp.dist / smp.infeasibility;
    est.gamma_hat = std::max(est.gamma_hat, smp.ratio);
    est.samples.push_back(std::move(smp));
  }
  est.no_infeasible_samples = counted == 0;
  est.unreliable = counted > 0 && est.failures * 10 > counted;
  fit_trend(est, x_bar);
  return est;
}

CqVerdict check_msr(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt) {
  const cq_detail::Base b = cq_detail::make_base(p, x_bar, opt);
  CqVerdict v = cq_detail::blank_verdict(b, CqKind::Msr, opt);
  if (b.k == 0) {
    v.status = CqStatus::CertifiedHolds;
    v.note = "r = m: x̄ is interior, so the error bound is trivial nearby";
    return v;
  }
  const CqBudget& bud = opt.budget;
  const std::uint64_t seed = derive_seed(bud.seed, 0x35);
  const MsrEstimate wide = estimate_msr_modulus(p, x_bar, bud.msr_radius, bud.msr_samples, seed, opt.tol);
  const MsrEstimate narrow =
      estimate_msr_modulus(p, x_bar, bud.msr_radius / bud.msr_shrink, bud.msr_samples, seed, opt.tol);
  v.msr = {wide, narrow};
  const bool usable = !wide.unreliable && !narrow.unreliable && !wide.no_infeasible_samples &&
                      !narrow.no_infeasible_samples;
  const bool trend = wide.trend_slope < 0.0 && wide.trend_growth > bud.msr_growth;
  const bool shrink = narrow.gamma_hat > bud.msr_growth * wide.gamma_hat;
  if (usable && (trend || shrink)) {
    v.status = CqStatus::Violated;
    Witness w;
    w.kind = "msr_ratio";
    w.source = "radius-shrink";
    w.x_bar = x_bar;
    w.value = trend ? wide.trend_growth : narrow.gamma_hat / wide.gamma_hat;
    for (const MsrEstimate* e : {&wide, &narrow}) {
      const auto it = std::max_element(e->samples.begin(), e->samples.end(),
                                       [](const MsrSample& a, const MsrSample& c) { return a.ratio < c.ratio; });
      WitnessPoint pt;
      pt.t = e->radius;
      pt.x = it->x;
      pt.family = {Vec(Eigen::Vector2d(it->dist, it->infeasibility))};
      w.sequence.push_back(std::move(pt));
    }
    v.witness = w;
    v.note = trend ? "the ratio curve rises toward x̄ (log-log slope " + std::to_string(wide.trend_slope) + ")"
                   : "the ratio grows by more than the allowed factor as the radius shrinks";
  } else {
    v.status = CqStatus::NoViolationFound;
    v.note = usable ? "ratio curve stays bounded across radii" : "estimate unreliable or empty";
  }
  return v;
}

}  // namespace nsdp
