#pragma once

#include "nsdp/cq.hpp"

#include <functional>
#include <random>
#include <vector>

namespace nsdp::cq_detail {

// Everything about x̄ the checks share.
struct Base {
  int n = 0;
  int m = 0;
  int r = 0;
  int k = 0;  // m − r
  Vec x_bar;
  SymMat g;
  std::vector<SymMat> dg;
  SpectralDecomp dec;
  Mat e0;  // kernel basis, m×k
  Mat p0;  // range basis, m×r
  double scale = 1.0;
};

Base make_base(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt);
CqVerdict blank_verdict(const Base& b, CqKind kind, const CqOptions& opt);

// Nonempty subsets of {0..k−1}, by size then lexicographically.
std::vector<std::vector<int>> subsets(int k);
std::vector<Vec> pick(const std::vector<Vec>& v, const std::vector<int>& idx);
std::vector<int> iota_subset(int k);
bool dependent(const std::vector<Vec>& v, bool positive, const Tolerances& tol);

// Closest element of E_r(d) to c in Frobenius norm: blockwise Procrustes over
// eigenvalue clusters, which also covers clusters straddling the rank boundary.
Mat closest_in_er(const SpectralDecomp& d, int r, const Mat& c);
// Nearest column-orthonormal matrix with range inside span(e0).
Mat project_to_span(const Mat& e0, const Mat& c);

std::mt19937_64 rng_for(const CqBudget& b, std::uint64_t salt);
Vec random_unit(int n, std::mt19937_64& rng);

// Witness directions, then ±coordinates, then `random_count` random unit vectors.
std::vector<Vec> direction_dictionary(const Base& b, const CqOptions& opt, int random_count,
                                      std::uint64_t salt);

// Unit z in kernel coordinates with zᵀ(E₀ᵀD_lE₀)z ≈ 0 for every l.
std::vector<Vec> zero_search(const Base& b, const CqBudget& budget);
// [z, completion] mapped back through E₀.
Mat complete_basis(const Mat& e0, const Vec& z);

// Minimizes ‖DG(x̄)*[E₀WE₀ᵀ]‖² over trace-one PSD W. Returns W.
SymMat spectraplex_minimizer(const Base& b, int iterations, double* value);

struct Level {
  double t = 0.0;
  Vec x;
  SymMat delta;  // zero unless a curve supplies it
  SpectralDecomp dec;
  std::vector<SymMat> dg;
};

using DeltaFn = std::function<SymMat(const Vec&)>;
std::vector<Level> build_levels(const NsdpProblem& p, const Base& b, const Vec& dir,
                                const CqBudget& budget, const DeltaFn& delta = {});

// Richardson-extrapolated limit of the aligned representatives, mapped into E_r(G(x̄)).
Mat canonical_limit(const Base& b, const std::vector<Level>& lv);

struct Rule {
  bool positive = false;   // PLD at x̄ instead of LD
  bool full_only = false;  // weak-nondegeneracy / weak-Robinson
};
Rule rule_for(CqKind kind);

struct CandidateEval {
  bool reachable = false;
  bool fails = false;
  std::vector<int> subset;
  std::vector<Mat> es;
};
CandidateEval evaluate_candidate(const Base& b, const std::vector<Level>& lv, const Mat& c,
                                 Rule rule, const CqOptions& opt);

// Runs every reachable candidate along one sequence. Returns a witness when all fail.
// The canonical limit of the sequence is always tried first.
std::optional<Witness> sequence_violation(const Base& b, const std::vector<Level>& lv,
                                          const std::vector<Mat>& candidates, Rule rule,
                                          const CqOptions& opt, const std::string& source);

std::vector<Mat> basis_candidates(const Base& b, const CqOptions& opt, bool with_q);

Witness dependent_family_witness(const Base& b, const Mat& e_bar, const std::vector<Vec>& fam,
                                 bool positive, const std::string& family_kind,
                                 const Tolerances& tol);

}  // namespace nsdp::cq_detail
