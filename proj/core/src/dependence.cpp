#include "nsdp/linalg.hpp"

#include "nsdp/errors.hpp"

#include <cmath>

namespace nsdp {

namespace {

Mat stack(const std::vector<Vec>& vectors) {
  const int n = static_cast<int>(vectors.front().size());
  Mat z(n, static_cast<int>(vectors.size()));
  for (size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) throw DimensionError("vector family has mixed lengths");
    z.col(static_cast<int>(j)) = vectors[j];
  }
  return z;
}

// Phase-1 simplex with Bland's rule on  Z α = 0, 1ᵀα = 1, α ≥ 0.
// Returns the phase-1 point (feasible or not); the caller judges the residual.
Vec phase_one(const Mat& z) {
  const int n = static_cast<int>(z.rows());
  const int p = static_cast<int>(z.cols());
  const int rows = n + 1;
  const int cols = p + rows;  // structural then artificial
  Mat t = Mat::Zero(rows, cols + 1);
  t.topLeftCorner(n, p) = z;
  t.block(n, 0, 1, p).setOnes();
  t.block(0, p, rows, rows).setIdentity();
  t(n, cols) = 1.0;
  std::vector<int> basis(static_cast<size_t>(rows));
  for (int i = 0; i < rows; ++i) basis[i] = p + i;

  constexpr double piv_tol = 1e-12;
  for (int iter = 0; iter < 50 * (cols + 1); ++iter) {
    // Reduced cost of column j is -(sum of rows) for structural columns.
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      bool is_basic = false;
      for (int b : basis) is_basic |= (b == j);
      if (is_basic) continue;
      double rc = (j >= p) ? 1.0 : 0.0;
      for (int i = 0; i < rows; ++i)
        if (basis[i] >= p) rc -= t(i, j);
      if (rc < -1e-12) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (t(i, enter) <= piv_tol) continue;
      const double ratio = t(i, cols) / t(i, enter);
      if (leave < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase 1
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < rows; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    basis[leave] = enter;
  }

  Vec alpha = Vec::Zero(p);
  for (int i = 0; i < rows; ++i)
    if (basis[i] < p) alpha(basis[i]) = std::max(0.0, t(i, cols));
  return alpha;
}

}  // namespace

int family_rank(const std::vector<Vec>& vectors, const Tolerances& tol) {
  if (vectors.empty()) return 0;
  const Mat z = stack(vectors);
  if (z.rows() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(z);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= tol.zero_abs) return 0;
  const double cut = std::max(tol.rank_rel * sv(0), tol.zero_abs);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

bool lin_dependent(const std::vector<Vec>& vectors, const Tolerances& tol) {
  if (vectors.empty()) return false;
  return family_rank(vectors, tol) < static_cast<int>(vectors.size());
}

std::optional<Vec> positive_dependence_weights(const std::vector<Vec>& vectors,
                                               const Tolerances& tol) {
  if (vectors.empty()) return std::nullopt;
  const Mat z = stack(vectors);
  const int p = static_cast<int>(z.cols());
  Vec norms(p);
  for (int j = 0; j < p; ++j) {
    norms(j) = z.col(j).norm();
    if (norms(j) <= tol.zero_abs) {
      Vec w = Vec::Zero(p);
      w(j) = 1.0;
      return w;
    }
  }
  const Mat zn = z * norms.cwiseInverse().asDiagonal();
  const Vec alpha = phase_one(zn);
  const double s = alpha.sum();
  if (std::abs(s - 1.0) > tol.pld || (zn * alpha).norm() > tol.pld) return std::nullopt;
  Vec w = alpha.cwiseQuotient(norms);
  return Vec(w / w.sum());
}

bool pos_lin_dependent(const std::vector<Vec>& vectors, const Tolerances& tol) {
  return positive_dependence_weights(vectors, tol).has_value();
}

Vec null_combination(const std::vector<Vec>& vectors) {
  const Mat z = stack(vectors);
  Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullV);
  return svd.matrixV().col(z.cols() - 1);
}

}  // namespace nsdp
