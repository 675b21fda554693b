#include "nsdp/caratheodory.hpp"

#include "nsdp/errors.hpp"

#include <cmath>

namespace nsdp {

namespace {

Vec combine(const std::vector<Vec>& z, const std::vector<int>& idx, const Vec& c) {
  Vec s = Vec::Zero(z.front().size());
  for (size_t k = 0; k < idx.size(); ++k) s += c(static_cast<int>(k)) * z[idx[k]];
  return s;
}

}  // namespace

Reduction reduce(const ConicCombination& comb, const Tolerances& tol) {
  if (comb.vectors.size() != comb.coeffs.size())
    throw DimensionError("reduce: vectors and coefficients differ in length");
  Reduction out;
  if (comb.vectors.empty()) return out;

  const auto& z = comb.vectors;
  double amax = 0.0;
  for (double a : comb.coeffs) amax = std::max(amax, std::abs(a));
  const double snap = 1e-14 * std::max(1.0, amax);

  std::vector<int> idx;
  std::vector<double> alpha;
  for (size_t i = 0; i < comb.coeffs.size(); ++i)
    // Zero vectors contribute nothing to the sum.
    if (std::abs(comb.coeffs[i]) > snap && z[i].norm() > tol.zero_abs) {
      idx.push_back(static_cast<int>(i));
      alpha.push_back(comb.coeffs[i]);
    }
  if (idx.empty()) return out;

  Vec target = Vec::Zero(z.front().size());
  for (size_t i = 0; i < comb.coeffs.size(); ++i) target += comb.coeffs[i] * z[i];

  for (int guard = 0; guard < static_cast<int>(comb.vectors.size()) + 1; ++guard) {
    std::vector<Vec> fam;
    for (int i : idx) fam.push_back(z[i]);
    if (!lin_dependent(fam, tol)) break;

    Vec beta = null_combination(fam);
    // Roundoff entries of β would otherwise give steps of order 1/eps.
    const double bmax = beta.cwiseAbs().maxCoeff();
    for (int k = 0; k < beta.size(); ++k)
      if (std::abs(beta(k)) <= 1e-12 * bmax) beta(k) = 0.0;

    // Step α - tβ until the first coefficient reaches zero, in whichever
    // orientation of β needs the shorter step.
    int hit = -1;
    double tstar = 0.0;
    double sign = 1.0;
    for (double orient : {1.0, -1.0}) {
      for (size_t k = 0; k < idx.size(); ++k) {
        const double bk = orient * beta(static_cast<int>(k));
        if (alpha[k] * bk <= 0) continue;
        const double t = alpha[k] / bk;
        if (hit < 0 || t < tstar) {
          hit = static_cast<int>(k);
          tstar = t;
          sign = orient;
        }
      }
    }
    beta *= sign;
    if (hit < 0) break;  // β vanished numerically

    std::vector<int> nidx;
    std::vector<double> nalpha;
    for (size_t k = 0; k < idx.size(); ++k) {
      double a = alpha[k] - tstar * beta(static_cast<int>(k));
      if (static_cast<int>(k) == hit || std::abs(a) <= snap) continue;
      nidx.push_back(idx[k]);
      nalpha.push_back(a);
    }
    idx = std::move(nidx);
    alpha = std::move(nalpha);
    if (idx.empty()) break;
  }

  if (!idx.empty()) {
    // Least-squares refit on the final independent family removes drift
    // accumulated by the steps, as long as signs survive.
    Mat zf(target.size(), static_cast<int>(idx.size()));
    for (size_t k = 0; k < idx.size(); ++k) zf.col(static_cast<int>(k)) = z[idx[k]];
    const Vec refit = zf.colPivHouseholderQr().solve(target);
    bool same_sign = true;
    for (size_t k = 0; k < idx.size(); ++k)
      same_sign &= refit(static_cast<int>(k)) * comb.coeffs[idx[k]] > 0;
    Vec cur = Eigen::Map<const Vec>(alpha.data(), static_cast<int>(alpha.size()));
    if (same_sign && (combine(z, idx, refit) - target).norm() <=
                         (combine(z, idx, cur) - target).norm())
      for (size_t k = 0; k < idx.size(); ++k) alpha[k] = refit(static_cast<int>(k));
  }

  out.subset = idx;
  out.coeffs = alpha;
  return out;
}

}  // namespace nsdp
