#include "cq_internal.hpp"

#include "nsdp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nsdp {

namespace {

constexpr std::array<std::pair<CqStatus, const char*>, 3> kStatusNames{{
    {CqStatus::CertifiedHolds, "CERTIFIED_HOLDS"},
    {CqStatus::NoViolationFound, "NO_VIOLATION_FOUND"},
    {CqStatus::Violated, "VIOLATED"},
}};

constexpr std::array<std::pair<CqKind, const char*>, 9> kKindNames{{
    {CqKind::Nondegeneracy, "nondegeneracy"},
    {CqKind::Robinson, "robinson"},
    {CqKind::WeakNondegeneracy, "weak-nondegeneracy"},
    {CqKind::WeakRobinson, "weak-robinson"},
    {CqKind::WeakCrcq, "weak-crcq"},
    {CqKind::WeakCpld, "weak-cpld"},
    {CqKind::SeqCrcq, "seq-crcq"},
    {CqKind::SeqCpld, "seq-cpld"},
    {CqKind::Msr, "msr"},
}};

}  // namespace

const char* to_string(CqStatus s) {
  for (const auto& [k, name] : kStatusNames)
    if (k == s) return name;
  return "?";
}

std::optional<CqStatus> cq_status_from_string(const std::string& s) {
  for (const auto& [k, name] : kStatusNames)
    if (s == name) return k;
  return std::nullopt;
}

const char* to_string(CqKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::optional<CqKind> cq_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (s == name) return kind;
  return std::nullopt;
}

const std::vector<CqKind>& all_cq_kinds() {
  static const std::vector<CqKind> kinds = [] {
    std::vector<CqKind> v;
    for (const auto& entry : kKindNames) v.push_back(entry.first);
    return v;
  }();
  return kinds;
}

std::vector<Vec> VFamily::diagonal() const {
  std::vector<Vec> out;
  for (int i = 0; i < size(); ++i) out.push_back(at(i, i));
  return out;
}

std::vector<Vec> VFamily::upper() const {
  std::vector<Vec> out;
  for (int i = 0; i < size(); ++i)
    for (int j = i; j < size(); ++j) out.push_back(at(i, j));
  return out;
}

VFamily v_family(const NsdpProblem& p, const Vec& x, const Mat& e) {
  if (x.size() != p.n) throw DimensionError("v_family: x has the wrong length");
  if (e.rows() != p.m) throw DimensionError("v_family: E must have m rows");
  const std::vector<SymMat> dg = p.dg_eval(x);
  VFamily f;
  f.x = x;
  f.e = e;
  const int k = static_cast<int>(e.cols());
  f.v.resize(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) f.v[i].push_back(v_vector(dg, e.col(i), e.col(j)));
  return f;
}

VFamily v_family(const NsdpProblem& p, const Vec& x, const EigBasis& e) {
  return v_family(p, x, e.cols);
}

SymMat separating_perturbation(const NsdpProblem& p, const Vec& x, const Vec& x_bar,
                               const EigBasis& e, const Mat& pblock, const Tolerances& tol) {
  const int m = p.m;
  if (x.size() != p.n || x_bar.size() != p.n)
    throw DimensionError("separating_perturbation: point has the wrong length");
  if (e.rows() != m || pblock.rows() != m || e.size() + pblock.cols() != m)
    throw DimensionError("separating_perturbation: [P, E] must be m×m");
  const double s = (x - x_bar).norm();
  if (s == 0.0) throw Error("separating_perturbation: requires x ≠ x̄");
  Mat u(m, m);
  u << pblock, e.cols;
  if ((u.transpose() * u - Mat::Identity(m, m)).norm() > tol.eps_orth(m))
    throw Error("separating_perturbation: [P, E] is not orthonormal");

  const SymMat gx = p.g_eval(x);
  const SpectralDecomp d = spectral_decompose(gx);
  const int r = static_cast<int>(pblock.cols());
  Vec lam(m);
  for (int i = 0; i < r; ++i) lam(i) = d.values(i);
  for (int j = 0; j < m - r; ++j) lam(r + j) = static_cast<double>(m - j) * s;
  return SymMat::outer_sum(u, lam) - gx;
}

namespace {

SymMat ex41_delta(const Vec& xv) {
  const double x = xv(0);
  const double c = 1.0 / (1.0 + (x + 1.0) * (x + 1.0));
  SymMat d(2);
  d.set(0, 0, -c * x * (x - 1.0) * (x - 1.0));
  d.set(0, 1, c * x * (x + 1.0));
  d.set(1, 1, c * (x + 2.0 * x * (x + 1.0) * (x + 1.0)));
  return d;
}

}  // namespace

std::optional<DeltaCurve> registered_curve(const std::string& name) {
  if (name == "ex4.1-delta") {
    DeltaCurve c;
    c.name = name;
    c.n = 1;
    c.m = 2;
    c.direction = Vec::Ones(1);
    c.delta = ex41_delta;
    return c;
  }
  return std::nullopt;
}

std::vector<std::string> registered_curve_names() { return {"ex4.1-delta"}; }

namespace cq_detail {

Base make_base(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt) {
  if (x_bar.size() != p.n) throw DimensionError("cq: x̄ has the wrong length");
  Base b;
  b.n = p.n;
  b.m = p.m;
  b.x_bar = x_bar;
  b.g = p.g_eval(x_bar);
  b.dec = spectral_decompose(b.g);
  const double lmin = b.m > 0 ? b.dec.values.minCoeff() : 0.0;
  if (lmin < -opt.tol.eps_psd(b.g.fro()))
    throw InfeasiblePointError("cq: x̄ is infeasible (λ_min(G(x̄)) = " + std::to_string(lmin) + ")",
                               -lmin);
  b.scale = std::max(1.0, b.m > 0 ? b.dec.values.cwiseAbs().maxCoeff() : 0.0);
  b.r = numerical_rank(b.dec.values, b.scale, opt.tol.rank_rel);
  b.k = b.m - b.r;
  if (b.k > opt.budget.max_kernel_dim)
    throw Error("cq: m − r = " + std::to_string(b.k) + " exceeds the subset enumeration cap " +
                std::to_string(opt.budget.max_kernel_dim));
  b.dg = p.dg_eval(x_bar);
  b.e0 = b.dec.vectors.rightCols(b.k);
  b.p0 = b.dec.vectors.leftCols(b.r);
  return b;
}

CqVerdict blank_verdict(const Base& b, CqKind kind, const CqOptions& opt) {
  CqVerdict v;
  v.kind = kind;
  v.rank = b.r;
  v.m = b.m;
  v.n = b.n;
  v.x_bar = b.x_bar;
  v.tol = opt.tol;
  v.budget = opt.budget;
  return v;
}

std::vector<std::vector<int>> subsets(int k) {
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= k; ++size) {
    std::vector<bool> sel(static_cast<size_t>(k), false);
    std::fill(sel.begin(), sel.begin() + size, true);
    do {
      std::vector<int> s;
      for (int i = 0; i < k; ++i)
        if (sel[i]) s.push_back(i);
      out.push_back(std::move(s));
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  return out;
}

std::vector<Vec> pick(const std::vector<Vec>& v, const std::vector<int>& idx) {
  std::vector<Vec> out;
  for (int i : idx) out.push_back(v[i]);
  return out;
}

std::vector<int> iota_subset(int k) {
  std::vector<int> s(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) s[i] = i;
  return s;
}

bool dependent(const std::vector<Vec>& v, bool positive, const Tolerances& tol) {
  return positive ? pos_lin_dependent(v, tol) : lin_dependent(v, tol);
}

Mat closest_in_er(const SpectralDecomp& d, int r, const Mat& c) {
  const int m = static_cast<int>(d.values.size());
  const double gap = 1e-12 * (1.0 + d.values.cwiseAbs().maxCoeff());
  Mat out(m, m - r);
  int s = 0;
  while (s < m) {
    int e = s + 1;
    while (e < m && d.values(e - 1) - d.values(e) <= gap) ++e;
    const int lo = std::max(s, r);
    if (lo < e) {
      const int q = e - lo;
      const Mat v = d.vectors.middleCols(s, e - s);
      const Mat w = polar_factor(v.transpose() * c.middleCols(lo - r, q));
      out.middleCols(lo - r, q) = v * w;
    }
    s = e;
  }
  return out;
}

Mat project_to_span(const Mat& e0, const Mat& c) { return e0 * polar_factor(e0.transpose() * c); }

std::mt19937_64 rng_for(const CqBudget& b, std::uint64_t salt) {
  return std::mt19937_64(derive_seed(b.seed, salt));
}

Vec random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = g(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

std::vector<Vec> direction_dictionary(const Base& b, const CqOptions& opt, int random_count,
                                      std::uint64_t salt) {
  std::vector<Vec> dirs;
  for (const Vec& w : opt.witness_directions)
    if (w.size() == b.n && w.norm() > 0.0) dirs.push_back(w / w.norm());
  for (int i = 0; i < b.n; ++i) {
    dirs.push_back(Vec::Unit(b.n, i));
    dirs.push_back(-Vec::Unit(b.n, i));
  }
  auto rng = rng_for(opt.budget, salt);
  for (int i = 0; i < random_count; ++i) dirs.push_back(random_unit(b.n, rng));
  return dirs;
}

namespace {

std::vector<Mat> kernel_blocks(const Base& b) {
  std::vector<Mat> out;
  for (const SymMat& d : b.dg) out.push_back(b.e0.transpose() * d.mat() * b.e0);
  return out;
}

}  // namespace

std::vector<Vec> zero_search(const Base& b, const CqBudget& budget) {
  const int k = b.k;
  std::vector<Vec> found;
  if (k == 0) return found;
  const std::vector<Mat> blk = kernel_blocks(b);
  double bnorm = 0.0;
  for (const Mat& m : blk) bnorm = std::max(bnorm, m.norm());
  const double accept = 1e-9 * (1.0 + bnorm);

  std::vector<Vec> starts;
  for (int i = 0; i < k; ++i) starts.push_back(Vec::Unit(k, i));
  auto rng = rng_for(budget, 0x2e70);
  for (int i = 0; i < budget.zero_search_starts; ++i) starts.push_back(random_unit(k, rng));

  const int nres = static_cast<int>(blk.size()) + 1;
  for (Vec z : starts) {
    for (int it = 0; it < 200; ++it) {
      Vec res(nres);
      Mat jac(nres, k);
      for (size_t l = 0; l < blk.size(); ++l) {
        res(l) = z.dot(blk[l] * z);
        jac.row(l) = 2.0 * (blk[l] * z).transpose();
      }
      res(nres - 1) = z.squaredNorm() - 1.0;
      jac.row(nres - 1) = 2.0 * z.transpose();
      if (res.norm() < 1e-300) break;
      const Vec step = jac.completeOrthogonalDecomposition().solve(-res);
      z += step;
      z /= z.norm();
      if (step.norm() < 1e-16) break;
    }
    double resid = 0.0;
    for (const Mat& m : blk) resid += std::pow(z.dot(m * z), 2);
    if (std::sqrt(resid) > accept) continue;
    const bool dup = std::any_of(found.begin(), found.end(), [&](const Vec& f) {
      return std::abs(std::abs(f.dot(z)) - 1.0) < 1e-8;
    });
    if (!dup) found.push_back(z);
  }
  return found;
}

Mat complete_basis(const Mat& e0, const Vec& z) {
  const int k = static_cast<int>(z.size());
  Mat q(k, k);
  q.col(0) = z / z.norm();
  if (k > 1) q.rightCols(k - 1) = orthonormal_complement(q.leftCols(1));
  return e0 * q;
}

namespace {

// Euclidean projection of v onto the unit simplex.
Vec simplex_project(const Vec& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0;
  double theta = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

SymMat spectraplex_project(const Mat& w) {
  const SpectralDecomp d = spectral_decompose(SymMat::from_upper(0.5 * (w + w.transpose())));
  return SymMat::outer_sum(d.vectors, simplex_project(d.values));
}

}  // namespace

SymMat spectraplex_minimizer(const Base& b, int iterations, double* value) {
  const int k = b.k;
  const std::vector<Mat> blk = kernel_blocks(b);
  auto eval = [&](const Mat& w, Mat* grad) {
    double phi = 0.0;
    if (grad) grad->setZero(k, k);
    for (const Mat& bl : blk) {
      const double a = (bl.array() * w.array()).sum();
      phi += a * a;
      if (grad) *grad += 2.0 * a * bl;
    }
    return phi;
  };
  double lip = 0.0;
  for (const Mat& bl : blk) lip += bl.squaredNorm();
  lip = 2.0 * std::max(lip, 1e-300);

  Mat w = Mat::Identity(k, k) / k;
  Mat y = w;
  double tk = 1.0;
  Mat grad(k, k);
  for (int it = 0; it < iterations; ++it) {
    eval(y, &grad);
    const Mat next = spectraplex_project(y - grad / lip).mat();
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    y = next + ((tk - 1.0) / tn) * (next - w);
    w = next;
    tk = tn;
  }
  if (value) *value = eval(w, nullptr);
  return SymMat::from_upper(w);
}

Witness dependent_family_witness(const Base& b, const Mat& e_bar, const std::vector<Vec>& fam,
                                 bool positive, const std::string& family_kind,
                                 const Tolerances& tol) {
  Witness w;
  w.kind = "dependent_family";
  w.source = family_kind == "full" ? "fixed-basis" : "basis-search";
  w.dependence = positive ? "positive" : "linear";
  w.family = family_kind;
  w.x_bar = b.x_bar;
  w.e_bar = e_bar;
  w.subset = iota_subset(static_cast<int>(fam.size()));
  w.family_at_bar = fam;
  w.bar_dependent = true;
  if (positive) {
    if (auto wt = positive_dependence_weights(fam, tol)) w.weights = *wt;
  } else {
    w.weights = null_combination(fam);
  }
  return w;
}

}  // namespace cq_detail
}  // namespace nsdp
