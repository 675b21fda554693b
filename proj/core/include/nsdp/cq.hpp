#pragma once

#include "nsdp/linalg.hpp"
#include "nsdp/model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsdp {

enum class CqStatus { CertifiedHolds, NoViolationFound, Violated };
const char* to_string(CqStatus s);
std::optional<CqStatus> cq_status_from_string(const std::string& s);

enum class CqKind {
  Nondegeneracy,
  Robinson,
  WeakNondegeneracy,
  WeakRobinson,
  WeakCrcq,
  WeakCpld,
  SeqCrcq,
  SeqCpld,
  Msr
};
const char* to_string(CqKind k);
std::optional<CqKind> cq_kind_from_string(const std::string& s);
const std::vector<CqKind>& all_cq_kinds();

// v_ij(x,E) for 1 ≤ i ≤ j ≤ m−r.
struct VFamily {
  Vec x;
  Mat e;
  std::vector<std::vector<Vec>> v;  // v[i][j-i]

  int size() const { return static_cast<int>(e.cols()); }
  const Vec& at(int i, int j) const { return i <= j ? v[i][j - i] : v[j][i - j]; }
  std::vector<Vec> diagonal() const;
  std::vector<Vec> upper() const;  // row-major i ≤ j
};

VFamily v_family(const NsdpProblem& p, const Vec& x, const EigBasis& e);
VFamily v_family(const NsdpProblem& p, const Vec& x, const Mat& e);

struct WitnessPoint {
  double t = 0.0;
  Vec x;
  SymMat delta;
  Mat e;
  std::vector<Vec> family;  // v_ii(x,E), i ∈ J
  bool dependent = false;
};

struct Witness {
  // dependent_family | sequence | primal_direction | msr_ratio
  std::string kind;
  std::string source;  // e.g. direction, curve:<name>, neighborhood, spectraplex
  std::string dependence;  // linear | positive
  std::string family = "diagonal";  // diagonal v_ii, or full v_ij (i ≤ j)
  Vec x_bar;
  Mat e_bar;
  std::vector<int> subset;           // J, zero-based columns of Ē
  std::vector<Vec> family_at_bar;    // v_ii(x̄,Ē), i ∈ J (or the full v_ij family)
  bool bar_dependent = false;
  Vec weights;                       // positive-dependence weights when available
  Vec direction;
  std::vector<WitnessPoint> sequence;
  double value = 0.0;  // Robinson certificate λ_min, or max MSR ratio
};

struct CqBudget {
  int n_q = 64;
  double t0 = 1e-1;
  int levels = 12;
  int random_directions = 32;
  int sequence_hits = 3;
  int robinson_iters = 200;
  int robinson_restarts = 10;
  int zero_search_starts = 16;
  int perturbation_samples = 4;
  int neighborhood_random_directions = 4;
  int msr_samples = 200;
  double msr_radius = 1e-1;
  double msr_shrink = 16.0;
  double msr_growth = 4.0;
  int max_kernel_dim = 12;
  std::uint64_t seed = 20240917;
};

// A registered Δ^k curve: x^k = x̄ + t_k·direction with Δ^k = delta(x^k).
struct DeltaCurve {
  std::string name;
  int n = 0;
  int m = 0;
  Vec direction;
  std::function<SymMat(const Vec& x)> delta;
};
std::optional<DeltaCurve> registered_curve(const std::string& name);
std::vector<std::string> registered_curve_names();

struct CqOptions {
  CqBudget budget;
  Tolerances tol;
  std::vector<Vec> witness_directions;
  std::vector<DeltaCurve> curves;
};

struct MsrSample {
  Vec x;
  double infeasibility = 0.0;  // ‖Π(−G(x))‖
  double dist = 0.0;           // best feasible distance found
  double ratio = 0.0;
  bool counted = false;        // infeasibility above ε_rank
  bool solve_ok = false;
  std::string note;
};

struct MsrEstimate {
  double radius = 0.0;
  std::vector<MsrSample> samples;
  double gamma_hat = 0.0;
  int failures = 0;
  bool no_infeasible_samples = false;
  bool unreliable = false;
  // Least-squares slope of log(max ratio) against log‖x − x̄‖ over radius bins,
  // and the innermost-to-outermost ratio growth. A bounded modulus gives slope ≈ 0.
  double trend_slope = 0.0;
  double trend_growth = 1.0;
  int trend_bins = 0;
};

struct CqVerdict {
  CqKind kind = CqKind::Nondegeneracy;
  CqStatus status = CqStatus::NoViolationFound;
  int rank = 0;
  int m = 0;
  int n = 0;
  Vec x_bar;
  Tolerances tol;
  CqBudget budget;
  std::optional<Witness> witness;
  std::vector<MsrEstimate> msr;  // MSR check only
  std::string note;
};

CqVerdict check_nondegeneracy(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt = {});
CqVerdict check_robinson(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt = {});
CqVerdict check_weak_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind,
                        const CqOptions& opt = {});
CqVerdict check_seq_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind,
                       const CqOptions& opt = {});
CqVerdict check_msr(const NsdpProblem& p, const Vec& x_bar, const CqOptions& opt = {});
CqVerdict check_cq(const NsdpProblem& p, const Vec& x_bar, CqKind kind, const CqOptions& opt = {});

// Δ = M − G(x) with M = U·Diag(λ_1..λ_r(G(x)), m‖x−x̄‖, …, (r+1)‖x−x̄‖)·Uᵀ, U = [P, E].
// Column j of E carries the j-th of the separated small eigenvalues in
// decreasing order, so E itself is an element of E_r(G(x)+Δ).
SymMat separating_perturbation(const NsdpProblem& p, const Vec& x, const Vec& x_bar,
                               const EigBasis& e, const Mat& pblock, const Tolerances& tol = {});

MsrEstimate estimate_msr_modulus(const NsdpProblem& p, const Vec& x_bar, double radius,
                                 int samples, std::uint64_t seed, const Tolerances& tol = {});

// Recomputes the witness from the problem alone and compares every dependence bit.
bool replay_witness(const NsdpProblem& p, const CqVerdict& v, std::string* why = nullptr);

// NLP-side CRCQ (positive = false) / CPLD (positive = true) sampler on g_i(x) ≥ 0.
struct NlpCqResult {
  CqStatus status = CqStatus::NoViolationFound;
  std::vector<int> active;
  std::vector<int> subset;
  Vec direction;
};
NlpCqResult check_nlp_cq(const std::vector<ScalarConstraint>& g, const Vec& x_bar, bool positive,
                         const CqOptions& opt = {});

// Direct implications between the conditions, stronger first.
const std::vector<std::pair<CqKind, CqKind>>& implication_edges();
// Transitive closure of implication_edges.
bool implies(CqKind stronger, CqKind weaker);

struct ImplicationConflict {
  CqKind stronger;
  CqKind weaker;
  CqStatus stronger_status;
};

// A VIOLATED weaker condition forces every stronger one to be VIOLATED too.
// Pairs where a stronger condition is not VIOLATED are reported. Kinds absent
// from the table are skipped.
std::vector<ImplicationConflict> implication_conflicts(const std::map<CqKind, CqStatus>& verdicts);

}  // namespace nsdp
