#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nsdp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Tolerances {
  double rank_rel = 1e-7;   // relative cut for ranks and dependence
  double zero_abs = 1e-10;  // absolute floor below which a vector counts as zero
  double pld = 1e-8;        // residual accepted by the positive-dependence LP
  double orth_per_dim = 1e-10;
  double recon_rel = 1e-9;
  double psd_rel = 1e-9;
  double comp_rel = 1e-8;

  double eps_orth(int m) const { return orth_per_dim * m; }
  double eps_recon(double fro) const { return recon_rel * (1.0 + fro); }
  double eps_psd(double fro) const { return psd_rel * (1.0 + fro); }
  double eps_comp(double y_norm) const { return comp_rel * (1.0 + y_norm); }
};

// Dense symmetric matrix. The only mutator writes (i,j) and (j,i) together,
// and every constructor symmetrizes, so asymmetric storage is unreachable.
class SymMat {
public:
  SymMat() = default;
  explicit SymMat(int m) : a_(Mat::Zero(m, m)) {}

  // Copies the upper triangle into the lower one.
  static SymMat from_upper(const Mat& a);
  // Requires |a - aᵀ| ≤ tol entrywise, then averages.
  static SymMat from_dense(const Mat& a, double tol = 1e-12);
  static SymMat identity(int m) { return from_upper(Mat::Identity(m, m)); }
  static SymMat zero(int m) { return SymMat(m); }
  static SymMat diag(const Vec& d);
  // Σ c_i u_i u_iᵀ for the columns of u.
  static SymMat outer_sum(const Mat& u, const Vec& c);

  int dim() const { return static_cast<int>(a_.rows()); }
  double operator()(int i, int j) const { return a_(i, j); }
  void set(int i, int j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }
  const Mat& mat() const { return a_; }

  double fro() const { return a_.norm(); }
  bool finite() const { return a_.allFinite(); }

  // Row-major upper triangle, the layout used by every file format.
  std::vector<double> upper() const;
  static SymMat from_upper_list(int m, const std::vector<double>& v);

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double s);
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(SymMat a, double s) { return a *= s; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }
  friend SymMat operator-(SymMat a) { return a *= -1.0; }

private:
  Mat a_;
};

double inner(const SymMat& a, const SymMat& b);

struct SpectralDecomp {
  Vec values;   // non-increasing
  Mat vectors;  // column i pairs with values(i)
  int sweeps = 0;
};

struct EigBasis {
  Mat cols;
  int source_rank = 0;
  int rows() const { return static_cast<int>(cols.rows()); }
  int size() const { return static_cast<int>(cols.cols()); }
};

struct JacobiOptions {
  int max_sweeps = 100;
  double rel_tol = 1e-15;
};

SpectralDecomp spectral_decompose(const SymMat& m, const JacobiOptions& opt = {});
SymMat reconstruct(const SpectralDecomp& d);

SymMat proj_psd(const SymMat& m);

struct MoreauParts {
  SymMat plus;
  SymMat minus;
};
MoreauParts moreau_split(const SymMat& m);

// nullopt is the full-rank outcome r = m, where E_r(M) is empty.
std::optional<EigBasis> eig_basis_smallest(const SymMat& m, int r);
std::optional<EigBasis> eig_basis_smallest(const SpectralDecomp& d, int r);

int numerical_rank(const Vec& values, double scale, double eps_rank = 1e-7);
// Rank of G(x̄) with the scale max(1, max|λ|).
int matrix_rank(const SymMat& m, double eps_rank = 1e-7);

double lambda_min(const SymMat& m);

bool lin_dependent(const std::vector<Vec>& vectors, const Tolerances& tol = {});
int family_rank(const std::vector<Vec>& vectors, const Tolerances& tol = {});
bool pos_lin_dependent(const std::vector<Vec>& vectors, const Tolerances& tol = {});
// Nonnegative weights summing to one with Σ α_i z_i ≈ 0, if any.
std::optional<Vec> positive_dependence_weights(const std::vector<Vec>& vectors,
                                               const Tolerances& tol = {});

// Unit-norm vector in the null space of [z_1 … z_p] (smallest right singular vector).
Vec null_combination(const std::vector<Vec>& vectors);

// Haar-distributed orthogonal k×k matrix (QR of a Gaussian with sign fix).
Mat haar_orthogonal(int k, std::mt19937_64& rng);
// Nearest column-orthonormal matrix in Frobenius norm.
Mat polar_factor(const Mat& a);
// Orthonormal basis of the orthogonal complement of range(a), a column-orthonormal.
Mat orthonormal_complement(const Mat& a);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

}  // namespace nsdp
