#pragma once

#include "nsdp/kkt.hpp"

#include <string>
#include <vector>

namespace nsdp {

struct InnerStats {
  int iterations = 0;
  double grad_norm = 0.0;
  std::string status;  // converged | max_iter | stagnation | unbounded
};

struct IterationRecord {
  int k = 0;
  Vec x;
  SymMat y;        // multiplier estimate Y^k
  SymMat y_tilde;  // safeguarded multiplier used in the subproblem
  SymMat delta;    // Δ^k
  Vec delta_x;     // δ^k
  double rho = 0.0;
  double v_norm = 0.0;     // ‖V^k‖ (AL) or ‖d^k‖ (SQP)
  bool rho_frozen = false; // the ‖V‖ test passed at this iteration
  double inner_tol = 0.0;
  double step = 1.0;       // SQP line-search step
  InnerStats inner;
  KktResidual residual;
};

namespace termination {
inline constexpr const char* kTarget = "target_tolerance";
inline constexpr const char* kMaxIter = "max_iterations";
inline constexpr const char* kStagnation = "stagnation";
inline constexpr const char* kUnbounded = "unbounded";
inline constexpr const char* kLineSearch = "line_search_failure";
inline constexpr const char* kSubproblem = "subproblem_infeasible";
}  // namespace termination

struct SolverTrace {
  std::string solver;
  int n = 0;
  int m = 0;
  std::vector<IterationRecord> records;
  std::string termination;
  std::string message;

  bool converged() const { return termination == termination::kTarget; }
  const IterationRecord& last() const { return records.back(); }
  AkktCertificate certificate() const;
};

std::string trace_to_jsonl(const SolverTrace& t);
SolverTrace trace_from_jsonl(const std::string& text);

}  // namespace nsdp
