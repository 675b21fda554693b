#include "properties.hpp"

#include "oracles.hpp"

#include "nsdp/caratheodory.hpp"
#include "nsdp/solvers.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace nsdp::testing {

namespace {

std::string num(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

// Spectra mixing repeated, zero, tiny and large eigenvalues over six decades.
Vec random_spectrum(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 4);
  const double scale = std::pow(10.0, 3.0 * u(rng));
  Vec v(m);
  for (int i = 0; i < m; ++i) {
    switch (kind(rng)) {
      case 0: v(i) = 0.0; break;
      case 1: v(i) = i > 0 ? v(i - 1) : scale; break;
      case 2: v(i) = 1e-9 * scale * u(rng); break;
      default: v(i) = scale * u(rng); break;
    }
  }
  return v;
}

std::vector<IntVec> random_int_family(std::mt19937_64& rng, int n, int q, int range) {
  std::uniform_int_distribution<long long> e(-range, range);
  std::uniform_int_distribution<int> zero(0, 9);
  std::vector<IntVec> f(q, IntVec(n));
  for (auto& z : f) {
    const bool all_zero = zero(rng) == 0;
    for (auto& c : z) c = all_zero ? 0 : e(rng);
  }
  // Occasionally repeat or negate a member to force structured dependence.
  if (q >= 2 && zero(rng) < 3) f[q - 1] = f[0];
  if (q >= 3 && zero(rng) < 3)
    for (int i = 0; i < n; ++i) f[q - 2][i] = -f[0][i];
  return f;
}

}  // namespace

std::optional<std::string> moreau_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 7);
  const int m = dim(rng);
  const Mat a = with_spectrum(random_spectrum(m, rng), rng);
  const SymMat s = SymMat::from_upper(a);
  const double sc = 1.0 + s.fro();
  const MoreauParts mp = moreau_split(s);

  const double recon = (s - (mp.plus - mp.minus)).fro();
  if (recon > 1e-9 * sc) return "M != plus - minus by " + num(recon);
  const double orth = std::abs(inner(mp.plus, mp.minus));
  if (orth > 1e-9 * sc * sc) return "<plus, minus> = " + num(orth);
  const double lp = oracle_eigenvalues(mp.plus.mat()).minCoeff();
  const double lm = oracle_eigenvalues(mp.minus.mat()).minCoeff();
  if (lp < -1e-9 * sc || lm < -1e-9 * sc) return "a part is not PSD";
  const double gap = (mp.plus.mat() - oracle_proj_psd(s.mat())).norm();
  if (gap > 1e-8 * sc) return "plus differs from the oracle projection by " + num(gap);
  return std::nullopt;
}

std::optional<std::string> projection_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 7);
  const int m = dim(rng);
  const SymMat a = SymMat::from_upper(with_spectrum(random_spectrum(m, rng), rng));
  const SymMat p = proj_psd(a);
  const double sc = 1.0 + a.fro();
  if (oracle_eigenvalues(p.mat()).minCoeff() < -1e-9 * sc) return "projection is not PSD";
  if ((proj_psd(p) - p).fro() > 1e-9 * sc) return "projection is not idempotent";

  // Variational inequality ⟨A − P, Z − P⟩ ≤ 0 over PSD Z, including rank-deficient Z.
  std::uniform_int_distribution<int> rk(0, m);
  for (int t = 0; t < 8; ++t) {
    const int r = rk(rng);
    const Mat b = random_symmetric(m, rng, std::sqrt(sc)).leftCols(r);
    const SymMat z = SymMat::from_upper(b * b.transpose());
    const double vi = inner(a - p, z - p);
    if (vi > 1e-9 * sc * (sc + z.fro())) return "variational inequality fails by " + num(vi);
    if ((a - p).fro() > (a - z).fro() + 1e-9 * sc) return "a PSD matrix is closer than the projection";
  }
  return std::nullopt;
}

std::optional<std::string> caratheodory_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dn(1, 4), dq(1, 7), sgn(0, 5);
  std::uniform_real_distribution<double> mag(0.1, 3.0);
  const int n = dn(rng);
  const int q = dq(rng);
  const auto fam = random_int_family(rng, n, q, 2);
  const auto vecs = to_vecs(fam);

  ConicCombination c;
  c.vectors = vecs;
  for (int i = 0; i < q; ++i) {
    const int s = sgn(rng);
    c.coeffs.push_back(s == 0 ? 0.0 : (s <= 3 ? 1.0 : -1.0) * mag(rng));
  }
  Vec target = Vec::Zero(n);
  double weight = 0.0;
  for (int i = 0; i < q; ++i) {
    target += c.coeffs[i] * vecs[i];
    weight += std::abs(c.coeffs[i]) * vecs[i].norm();
  }
  const double tol = 1e-9 * (1.0 + weight);

  // Brute force: every subset of the support that is exactly independent and
  // reproduces the target with sign-consistent coefficients.
  // Empty string means valid.
  auto check = [&](const std::vector<int>& j, const std::vector<double>* given) -> std::string {
    for (int i : j)
      if (c.coeffs[i] == 0.0) return "uses a member with zero coefficient";
    std::vector<IntVec> sub;
    for (int i : j) sub.push_back(fam[i]);
    if (exact_lin_dependent(sub)) return "subfamily is linearly dependent";
    Vec coef(static_cast<int>(j.size()));
    if (given) {
      for (size_t t = 0; t < j.size(); ++t) coef(static_cast<int>(t)) = (*given)[t];
    } else if (!j.empty()) {
      Mat z(n, static_cast<int>(j.size()));
      for (size_t t = 0; t < j.size(); ++t) z.col(static_cast<int>(t)) = vecs[j[t]];
      coef = z.colPivHouseholderQr().solve(target);
    }
    Vec sum = Vec::Zero(n);
    for (size_t t = 0; t < j.size(); ++t) {
      const double ct = coef(static_cast<int>(t));
      if (ct * c.coeffs[j[t]] <= 0.0) return "coefficient sign changed";
      sum += ct * vecs[j[t]];
    }
    if ((sum - target).norm() > tol) return "sum off by " + num((sum - target).norm());
    return {};
  };
  auto valid = [&](const std::vector<int>& j, const std::vector<double>* given) {
    return check(j, given).empty();
  };
  int valid_count = 0;
  for (std::uint32_t mask = 0; mask < (1u << q); ++mask) {
    std::vector<int> j;
    for (int i = 0; i < q; ++i)
      if (mask & (1u << i)) j.push_back(i);
    valid_count += valid(j, nullptr) ? 1 : 0;
  }
  if (valid_count == 0) return "oracle found no valid reduction (oracle bug)";

  const Reduction r = reduce(c);
  if (r.subset.size() != r.coeffs.size()) return "subset and coefficients differ in length";
  for (size_t t = 1; t < r.subset.size(); ++t)
    if (r.subset[t] <= r.subset[t - 1]) return "subset not increasing";
  for (int i : r.subset)
    if (i < 0 || i >= q) return "subset index out of range";
  if (static_cast<int>(r.subset.size()) > exact_rank(fam)) return "subset larger than the family rank";
  if (const std::string why = check(r.subset, &r.coeffs); !why.empty()) return "reduction: " + why;
  return std::nullopt;
}

std::optional<std::string> dependence_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dn(1, 4), dq(1, 6);
  const int n = dn(rng);
  const int q = dq(rng);
  const auto fam = random_int_family(rng, n, q, 3);
  const auto vecs = to_vecs(fam);
  const bool ld = lin_dependent(vecs);
  if (ld != exact_lin_dependent(fam)) return std::string("lin_dependent says ") + (ld ? "true" : "false");
  const bool pld = pos_lin_dependent(vecs);
  if (pld != exact_pos_dependent(fam)) return std::string("pos_lin_dependent says ") + (pld ? "true" : "false");
  if (pld && !ld) return "positively dependent but linearly independent";
  return std::nullopt;
}

std::optional<std::string> al_gradient_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dn(1, 4), dm(1, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> N;
  const int n = dn(rng);
  const int m = dm(rng);
  MatrixPolyProblem mp = MatrixPolyProblem::empty(n, m);
  for (int i = 0; i < n; ++i) mp.objective.c_lin(i) = N(rng);
  const Mat c = random_symmetric(n, rng);
  mp.objective.c_quad = c * c.transpose();
  mp.a0 = SymMat::from_upper(random_symmetric(m, rng));
  for (int i = 0; i < n; ++i) mp.a_lin[i] = SymMat::from_upper(random_symmetric(m, rng));
  std::uniform_int_distribution<int> di(0, n - 1);
  int a = di(rng), b = di(rng);
  if (a > b) std::swap(a, b);
  mp.b_quad.push_back({a, b, SymMat::from_upper(random_symmetric(m, rng, 0.5))});
  const NsdpProblem p = mp.to_problem();

  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  const double rho = std::pow(10.0, 2.0 * u(rng));
  const Mat yb = random_symmetric(m, rng);
  const SymMat yt = SymMat::from_upper((u(rng) > 0 ? 1.0 : 0.0) * yb * yb.transpose());

  const Vec g = al_gradient(p, x, rho, yt);
  const Vec fd = oracle_gradient([&](const Vec& z) { return al_value(p, z, rho, yt); }, x);
  const double err = (g - fd).norm();
  if (err > 1e-5 * (1.0 + g.norm())) return "gradient differs from finite differences by " + num(err);
  return std::nullopt;
}

const std::vector<Property>& properties() {
  static const std::vector<Property> all = {
      {"moreau", moreau_case},
      {"projection", projection_case},
      {"caratheodory", caratheodory_case},
      {"dependence", dependence_case},
      {"al-gradient", al_gradient_case},
  };
  return all;
}

}  // namespace nsdp::testing
