#include "nsdp/kkt.hpp"

#include "nsdp/caratheodory.hpp"
#include "nsdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nsdp {

double KktResidual::max() const {
  return std::max({stationarity, feasibility, complementarity, dual_feasibility});
}

KktResidual kkt_residual(const NsdpProblem& p, const Vec& x, const SymMat& y) {
  if (y.dim() != p.m) throw DimensionError("kkt_residual: multiplier has the wrong order");
  const SymMat gx = p.g_eval(x);
  KktResidual r;
  r.stationarity = lagrangian_grad(p, x, y).norm();
  r.feasibility = proj_psd(-gx).fro();
  r.complementarity = std::abs(inner(gx, y));
  r.dual_feasibility = std::max(0.0, -lambda_min(y));
  return r;
}

SymMat penalty_multiplier(const NsdpProblem& p, const Vec& x, double rho) {
  if (!(rho > 0)) throw Error("penalty_multiplier: rho must be positive");
  return rho * proj_psd(-p.g_eval(x));
}

SymMat penalty_perturbation(const NsdpProblem& p, const Vec& x) {
  return proj_psd(-p.g_eval(x));
}

AkktCheck akkt_check(const NsdpProblem& p, const AkktCertificate& cert, double tol,
                     const Tolerances& tols) {
  AkktCheck out;
  if (cert.records.empty()) {
    out.first_failure = 0;
    out.reason = "empty certificate";
    return out;
  }
  std::vector<double> size;
  for (size_t k = 0; k < cert.records.size(); ++k) {
    const auto& rec = cert.records[k];
    const int ik = static_cast<int>(k);
    const double ynorm = rec.y.fro();
    const double gap = (lagrangian_grad(p, rec.x, rec.y) - rec.delta_x).norm();
    if (gap > 1e-10 * (1.0 + ynorm)) {
      out.first_failure = ik;
      out.reason = "delta_x does not match the Lagrangian gradient";
      return out;
    }
    if (lambda_min(rec.y) < -tols.eps_psd(ynorm)) {
      out.first_failure = ik;
      out.reason = "multiplier is not PSD";
      return out;
    }
    const SymMat shifted = p.g_eval(rec.x) + rec.delta;
    if (lambda_min(shifted) < -tols.eps_psd(shifted.fro())) {
      out.first_failure = ik;
      out.reason = "G(x)+Delta is not PSD";
      return out;
    }
    if (std::abs(inner(shifted, rec.y)) > tols.eps_comp(ynorm)) {
      out.first_failure = ik;
      out.reason = "<G(x)+Delta, Y> is not zero";
      return out;
    }
    size.push_back(std::max(rec.delta_x.norm(), rec.delta.fro()));
  }
  const size_t last = size.size() - 1;
  const size_t half = (size.size() - 1) / 2;
  const bool small = size[last] <= tol;
  const bool decreasing = size.size() == 1 || size[last] <= 1e-12 || size[last] < size[half];
  if (!small || !decreasing) {
    out.first_failure = static_cast<int>(size.size());
    out.reason = !small ? "final perturbation above tolerance"
                        : "perturbations do not decrease over the trailing window";
    return out;
  }
  out.passed = true;
  return out;
}

const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Success:
      return "success";
    case RecoveryStatus::Diverged:
      return "diverged";
    case RecoveryStatus::NoCertificate:
      return "no_certificate";
  }
  return "unknown";
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Closest matrix with orthonormal columns inside range(kernel).
Mat project_to_kernel(const Mat& e, const Mat& kernel) {
  return kernel * polar_factor(kernel.transpose() * e);
}

}  // namespace

MultiplierRecovery recover_multiplier(const NsdpProblem& p, const AkktCertificate& cert,
                                      const Vec& x_bar, const RecoveryConfig& cfg) {
  const auto& recs = cert.records;
  if (static_cast<int>(recs.size()) < cfg.min_records)
    throw Error("recover_multiplier: trace has " + std::to_string(recs.size()) +
                " records, at least " + std::to_string(cfg.min_records) + " needed");

  MultiplierRecovery out;
  const SymMat g_bar = p.g_eval(x_bar);
  const SpectralDecomp gd = spectral_decompose(g_bar);
  const double scale = std::max(1.0, gd.values.cwiseAbs().maxCoeff());
  const int r = numerical_rank(gd.values, scale, std::max(cfg.tol.rank_rel, cfg.limit_rank_rel));
  const int k_dim = p.m - r;
  out.rank = r;

  if (k_dim == 0) {
    out.y_star = SymMat(p.m);
    out.residual = kkt_residual(p, x_bar, out.y_star);
    out.status = out.residual.max() <= cfg.residual_tol ? RecoveryStatus::Success
                                                         : RecoveryStatus::NoCertificate;
    out.note = "G(x_bar) has full rank; the only candidate multiplier is zero";
    return out;
  }
  const Mat kernel = gd.vectors.rightCols(k_dim);

  std::vector<std::vector<int>> subsets;
  std::vector<std::vector<double>> coeffs;
  std::vector<Mat> bases;
  for (const auto& rec : recs) {
    const SpectralDecomp yd = spectral_decompose(rec.y);
    const Mat u = yd.vectors.leftCols(k_dim);
    const Vec lam = yd.values.head(k_dim).cwiseMax(0.0);
    ConicCombination comb;
    comb.vectors = v_diagonal(p.dg_eval(rec.x), u);
    comb.coeffs.assign(lam.data(), lam.data() + lam.size());
    const Reduction red = reduce(comb, cfg.tol);
    double mx = 0.0;
    for (double c : red.coeffs) mx = std::max(mx, c);
    out.max_coeff.push_back(mx);
    subsets.push_back(red.subset);
    coeffs.push_back(red.coeffs);
    bases.push_back(u);
  }

  const size_t last = recs.size() - 1;
  const size_t half = recs.size() / 2;
  out.subset = subsets[last];
  const Mat& u_last = bases[last];
  Mat e_sel(p.m, static_cast<int>(out.subset.size()));
  for (size_t j = 0; j < out.subset.size(); ++j)
    e_sel.col(static_cast<int>(j)) = u_last.col(out.subset[j]);
  out.e_bar = out.subset.empty() ? e_sel : project_to_kernel(e_sel, kernel);
  out.limit_family = v_diagonal(p.dg_eval(x_bar), out.e_bar);
  // x̄ is known only to trace accuracy, so a limit vector that small counts as zero.
  Tolerances limit_tol = cfg.tol;
  double dg_scale = 1.0;
  for (const SymMat& d : p.dg_eval(x_bar)) dg_scale = std::max(dg_scale, d.fro());
  limit_tol.zero_abs = std::max(limit_tol.zero_abs, cfg.limit_rank_rel * dg_scale);
  out.limit_family_pld = !out.limit_family.empty() && pos_lin_dependent(out.limit_family, limit_tol);

  const double grow_base = std::max(out.max_coeff[half], 1e-12);
  if (out.max_coeff[last] > cfg.divergence_factor * grow_base && out.max_coeff[last] > 1e-8) {
    out.status = RecoveryStatus::Diverged;
    out.coeffs = coeffs[last];
    out.note = "reduced coefficients grew by a factor " +
               std::to_string(out.max_coeff[last] / grow_base) +
               " over the trailing half of the trace";
    return out;
  }

  // Limits: median of the last window entries, per eigen-index.
  const size_t w = std::min<size_t>(static_cast<size_t>(cfg.limit_window), recs.size());
  Vec alpha_bar(static_cast<int>(out.subset.size()));
  for (size_t j = 0; j < out.subset.size(); ++j) {
    std::vector<double> tail;
    for (size_t k = recs.size() - w; k < recs.size(); ++k) {
      double c = 0.0;
      for (size_t t = 0; t < subsets[k].size(); ++t)
        if (subsets[k][t] == out.subset[j]) c = coeffs[k][t];
      tail.push_back(c);
    }
    alpha_bar(static_cast<int>(j)) = median(tail);
  }
  out.coeffs.assign(alpha_bar.data(), alpha_bar.data() + alpha_bar.size());
  out.y_star = out.subset.empty() ? SymMat(p.m) : SymMat::outer_sum(out.e_bar, alpha_bar);
  out.residual = kkt_residual(p, x_bar, out.y_star);
  if (out.residual.max() <= cfg.residual_tol) {
    out.status = RecoveryStatus::Success;
  } else {
    out.status = RecoveryStatus::NoCertificate;
    out.note = "bounded coefficients, but the limit pair misses the KKT tolerance";
  }
  return out;
}

}  // namespace nsdp
