#pragma once

#include "nsdp/linalg.hpp"
#include "nsdp/model.hpp"

#include <string>
#include <vector>

namespace nsdp {

struct KktResidual {
  double stationarity = 0.0;      // ‖∇_x L(x,Y)‖
  double feasibility = 0.0;       // ‖Π(−G(x))‖_F
  double complementarity = 0.0;   // |⟨G(x),Y⟩|
  double dual_feasibility = 0.0;  // [−λ_min(Y)]_+
  double max() const;
};

KktResidual kkt_residual(const NsdpProblem& p, const Vec& x, const SymMat& y);

// ρ Π(−G(x))
SymMat penalty_multiplier(const NsdpProblem& p, const Vec& x, double rho);
// Δ = Π(−G(x)): G+Δ = Π(G) ⪰ 0 and ⟨G+Δ, ρΠ(−G)⟩ = 0.
SymMat penalty_perturbation(const NsdpProblem& p, const Vec& x);

struct AkktRecord {
  Vec x;
  SymMat y;
  SymMat delta;  // Δ^k
  Vec delta_x;   // δ^k = ∇_x L(x^k, Y^k)
};

struct AkktCertificate {
  std::vector<AkktRecord> records;
};

struct AkktCheck {
  bool passed = false;
  int first_failure = -1;  // record index, or size() for the trailing-window test
  std::string reason;
};

AkktCheck akkt_check(const NsdpProblem& p, const AkktCertificate& cert, double tol,
                     const Tolerances& tols = {});

struct RecoveryConfig {
  int min_records = 5;
  int limit_window = 3;            // median over the last entries
  double divergence_factor = 10.0;  // growth across the trailing half
  double residual_tol = 1e-4;
  // x̄ is a trace iterate, so its rank and the limit family are read at trace
  // accuracy rather than rank_rel.
  double limit_rank_rel = 1e-4;
  Tolerances tol;
};

enum class RecoveryStatus { Success, Diverged, NoCertificate };
const char* to_string(RecoveryStatus s);

struct MultiplierRecovery {
  RecoveryStatus status = RecoveryStatus::NoCertificate;
  int rank = 0;                    // r = rank G(x̄)
  SymMat y_star;                   // success only
  KktResidual residual;            // at (x̄, Y*)
  std::vector<int> subset;         // J, eigen-index among the top m−r pairs
  std::vector<double> coeffs;      // limiting ᾱ_i on success, last α̃_i otherwise
  Mat e_bar;                       // columns ē_i, i ∈ J
  std::vector<Vec> limit_family;   // v_ii(x̄, Ē), i ∈ J
  bool limit_family_pld = false;
  std::vector<double> max_coeff;   // per record, max reduced coefficient
  std::string note;
};

// Throws Error when fewer than cfg.min_records records are available.
MultiplierRecovery recover_multiplier(const NsdpProblem& p, const AkktCertificate& cert,
                                      const Vec& x_bar, const RecoveryConfig& cfg = {});

}  // namespace nsdp
