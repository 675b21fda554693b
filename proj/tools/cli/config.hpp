#pragma once

#include "nsdp/cq.hpp"
#include "nsdp/solvers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsdp::cli {

struct RunConfig {
  double target_tol = 1e-6;
  int max_outer = 60;
  double penalty_rho1 = 1.0;
  double penalty_factor = 10.0;
  AlConfig al;
  SqpConfig sqp;
  CqBudget budget;
};

// JSON overrides file; unknown keys are rejected so typos do not pass silently.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
// "key=value" budget overrides, e.g. n_q=16.
void apply_budget_override(CqBudget& b, const std::string& kv);

PenaltyConfig penalty_config(const RunConfig& c);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace nsdp::cli
