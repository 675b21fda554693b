#pragma once

#include "nsdp/model.hpp"
#include "nsdp/trace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsdp {

// Returns the objective value and writes the gradient.
using Objective = std::function<double(const Vec& x, Vec& grad)>;

struct InnerOptions {
  int memory = 5;
  double c1 = 1e-4;
  int stagnation_window = 200;  // iterations without gradient progress
  double radius = 1e6;          // ‖x‖ beyond this reports an unbounded model
  int max_backtracks = 60;
};

struct InnerResult {
  Vec x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::string status;  // converged | max_iter | stagnation | unbounded
};

// L-BFGS directions with Armijo backtracking. Never increases the objective.
InnerResult inner_minimize(const Objective& obj, const Vec& x_start, double grad_tol,
                           int max_iter, const InnerOptions& opt = {});

// L_{ρ,Ỹ}(x) = f + (ρ/2)‖Π(−G + Ỹ/ρ)‖² − ‖Ỹ‖²/(2ρ) and its gradient
// ∇f − DG*[ρ Π(−G + Ỹ/ρ)], computed independently of each other.
double al_value(const NsdpProblem& p, const Vec& x, double rho, const SymMat& y_tilde);
Vec al_gradient(const NsdpProblem& p, const Vec& x, double rho, const SymMat& y_tilde);

struct PenaltyConfig {
  std::vector<double> rho;        // ρ_k, one per outer iteration
  std::vector<double> inner_tol;  // ε_k
  double target_tol = 1e-6;
  int inner_max_iter = 5000;
  InnerOptions inner;

  // ρ_k = rho1·factor^(k−1), ε_k = max(0.1·10^(−k+1)·…, 0.1·target)
  static PenaltyConfig geometric(int max_outer, double target_tol = 1e-6, double rho1 = 1.0,
                                 double factor = 10.0);
};

SolverTrace solve_external_penalty(const NsdpProblem& p, const Vec& x0, const PenaltyConfig& cfg);
SolverTrace solve_external_penalty(const NsdpProblem& p, const Vec& x0,
                                   const std::vector<double>& rho_schedule,
                                   const std::vector<double>& inner_tol_schedule, int max_outer);

enum class SafeguardPolicy { Projection, Zero, Hold };

struct AlConfig {
  double eps0 = 0.1;       // ε_k = eps0·eps_ratio^(k−1), floored at the target
  double eps_ratio = 0.5;
  double safeguard_radius = 1e3;  // B = {Y ⪰ 0 : ‖Y‖_F ≤ R}
  double theta = 0.5;             // ‖V^k‖ ≤ θ‖V^{k−1}‖ keeps ρ
  double gamma = 10.0;            // otherwise ρ ← γρ
  double rho1 = 1.0;
  SafeguardPolicy policy = SafeguardPolicy::Projection;
  std::optional<SymMat> y_tilde1;  // defaults to zero
  int inner_max_iter = 5000;
  InnerOptions inner;

  void validate() const;
  double epsilon(int k, double target_tol) const;  // k is 1-based
};

SolverTrace solve_augmented_lagrangian(const NsdpProblem& p, const Vec& x0, const AlConfig& cfg,
                                       double target_tol, int max_outer);

enum class HessianPolicy { DampedBfgs, Identity };

struct SqpConfig {
  double armijo_sigma = 1e-4;
  int max_halvings = 50;
  HessianPolicy h_policy = HessianPolicy::DampedBfgs;
  std::optional<Mat> h0;   // defaults to the identity
  double h_cap = 1e6;      // Frobenius cap; the update resets to I beyond it
  double sub_target_factor = 1e-2;
  int sub_max_outer = 200;
  AlConfig sub;
};

SolverTrace solve_sqp(const NsdpProblem& p, const Vec& x0, const SymMat& y0, const SqpConfig& cfg,
                      double target_tol, int max_iter);

}  // namespace nsdp
