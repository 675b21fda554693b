#include "nsdp/linalg.hpp"

#include "nsdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsdp {

SymMat SymMat::from_upper(const Mat& a) {
  if (a.rows() != a.cols()) throw DimensionError("SymMat: matrix is not square");
  SymMat s(static_cast<int>(a.rows()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) s.set(i, j, a(i, j));
  return s;
}

SymMat SymMat::from_dense(const Mat& a, double tol) {
  if (a.rows() != a.cols()) throw DimensionError("SymMat: matrix is not square");
  SymMat s(static_cast<int>(a.rows()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > tol * (1.0 + std::abs(a(i, j))))
        throw DimensionError("SymMat: input is not symmetric at (" + std::to_string(i) +
                             "," + std::to_string(j) + ")");
      s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    }
  return s;
}

SymMat SymMat::diag(const Vec& d) {
  SymMat s(static_cast<int>(d.size()));
  for (int i = 0; i < d.size(); ++i) s.set(i, i, d(i));
  return s;
}

SymMat SymMat::outer_sum(const Mat& u, const Vec& c) {
  Mat a = u * c.asDiagonal() * u.transpose();
  SymMat s(static_cast<int>(u.rows()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return s;
}

std::vector<double> SymMat::upper() const {
  std::vector<double> v;
  const int m = dim();
  v.reserve(static_cast<size_t>(m * (m + 1) / 2));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) v.push_back(a_(i, j));
  return v;
}

SymMat SymMat::from_upper_list(int m, const std::vector<double>& v) {
  if (m < 0 || v.size() != static_cast<size_t>(m * (m + 1) / 2))
    throw DimensionError("SymMat: upper-triangle list has the wrong length");
  SymMat s(m);
  size_t k = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) s.set(i, j, v[k++]);
  return s;
}

SymMat& SymMat::operator+=(const SymMat& o) {
  if (o.dim() != dim()) throw DimensionError("SymMat: order mismatch in +");
  a_ += o.a_;
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  if (o.dim() != dim()) throw DimensionError("SymMat: order mismatch in -");
  a_ -= o.a_;
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  a_ *= s;
  return *this;
}

double inner(const SymMat& a, const SymMat& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner: order mismatch");
  return a.mat().cwiseProduct(b.mat()).sum();
}

namespace {

double off_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

void rotate(Mat& a, Mat& v, int p, int q) {
  const double apq = a(p, q);
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const int m = static_cast<int>(a.rows());
  for (int k = 0; k < m; ++k) {
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (int k = 0; k < m; ++k) {
    const double apk = a(p, k), aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = a(q, p) = 0.0;
  for (int k = 0; k < m; ++k) {
    const double vkp = v(k, p), vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

// Largest-magnitude entry positive; the first such entry wins near-ties.
void normalize_sign(Eigen::Ref<Vec> u) {
  int best = 0;
  for (int i = 1; i < u.size(); ++i)
    if (std::abs(u(i)) > std::abs(u(best)) + 1e-12) best = i;
  if (u(best) < 0) u = -u;
}

bool lex_greater(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) > b(i) + 1e-12) return true;
    if (a(i) < b(i) - 1e-12) return false;
  }
  return false;
}

}  // namespace

SpectralDecomp spectral_decompose(const SymMat& m, const JacobiOptions& opt) {
  if (!m.finite()) throw Error("spectral_decompose: non-finite entries");
  const int n = m.dim();
  Mat a = m.mat();
  Mat v = Mat::Identity(n, n);
  const double scale = a.norm();
  int sweeps = 0;
  double off = off_norm(a);
  while (off > opt.rel_tol * scale && off > 0.0) {
    if (sweeps >= opt.max_sweeps)
      throw ConvergenceError("spectral_decompose: Jacobi sweep cap reached", off);
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        if (a(p, q) != 0.0) rotate(a, v, p, q);
    ++sweeps;
    off = off_norm(a);
  }

  for (int j = 0; j < n; ++j) normalize_sign(v.col(j));

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });
  // Clusters of numerically equal eigenvalues are ordered by their vectors.
  const double tie = 1e-13 * (1.0 + scale);
  for (int s = 0; s < n;) {
    int e = s + 1;
    while (e < n && a(order[e - 1], order[e - 1]) - a(order[e], order[e]) <= tie) ++e;
    if (e - s > 1)
      std::stable_sort(order.begin() + s, order.begin() + e,
                       [&](int i, int j) { return lex_greater(v.col(i), v.col(j)); });
    s = e;
  }

  SpectralDecomp d;
  d.values.resize(n);
  d.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    d.values(k) = a(order[k], order[k]);
    d.vectors.col(k) = v.col(order[k]);
  }
  d.sweeps = sweeps;
  return d;
}

SymMat reconstruct(const SpectralDecomp& d) { return SymMat::outer_sum(d.vectors, d.values); }

SymMat proj_psd(const SymMat& m) {
  const SpectralDecomp d = spectral_decompose(m);
  return SymMat::outer_sum(d.vectors, d.values.cwiseMax(0.0));
}

MoreauParts moreau_split(const SymMat& m) {
  const SpectralDecomp d = spectral_decompose(m);
  return {SymMat::outer_sum(d.vectors, d.values.cwiseMax(0.0)),
          SymMat::outer_sum(d.vectors, (-d.values).cwiseMax(0.0))};
}

std::optional<EigBasis> eig_basis_smallest(const SpectralDecomp& d, int r) {
  const int m = static_cast<int>(d.values.size());
  if (r < 0 || r > m) throw DimensionError("eig_basis_smallest: rank out of range");
  if (r == m) return std::nullopt;
  return EigBasis{d.vectors.rightCols(m - r), r};
}

std::optional<EigBasis> eig_basis_smallest(const SymMat& m, int r) {
  if (r < 0 || r > m.dim()) throw DimensionError("eig_basis_smallest: rank out of range");
  return eig_basis_smallest(spectral_decompose(m), r);
}

int numerical_rank(const Vec& values, double scale, double eps_rank) {
  int r = 0;
  for (int i = 0; i < values.size(); ++i)
    if (values(i) > eps_rank * scale) ++r;
  return r;
}

int matrix_rank(const SymMat& m, double eps_rank) {
  const SpectralDecomp d = spectral_decompose(m);
  const double scale = std::max(1.0, d.values.cwiseAbs().maxCoeff());
  return numerical_rank(d.values, scale, eps_rank);
}

double lambda_min(const SymMat& m) {
  if (m.dim() == 0) return 0.0;
  return spectral_decompose(m).values.minCoeff();
}

Mat haar_orthogonal(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) z(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(k, k);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Mat polar_factor(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Mat orthonormal_complement(const Mat& a) {
  const int m = static_cast<int>(a.rows());
  const int k = static_cast<int>(a.cols());
  if (k == 0) return Mat::Identity(m, m);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(m, m);
  return q.rightCols(m - k);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ (counter * 0xd1b54a32d192ed03ULL));
}

}  // namespace nsdp
