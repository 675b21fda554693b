#pragma once

#include "nsdp/linalg.hpp"

#include <vector>

namespace nsdp {

struct ConicCombination {
  std::vector<Vec> vectors;
  std::vector<double> coeffs;
};

struct Reduction {
  std::vector<int> subset;     // increasing indices into the input family
  std::vector<double> coeffs;  // pairs with subset
};

// Rewrites Σ α_i z_i over a linearly independent subfamily whose coefficients
// keep the sign of the original ones. Zero coefficients never survive.
Reduction reduce(const ConicCombination& comb, const Tolerances& tol = {});

}  // namespace nsdp
