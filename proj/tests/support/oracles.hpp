#pragma once

// Reference implementations that share no code with the library under test.

#include "nsdp/linalg.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nsdp::testing {

using IntVec = std::vector<long long>;

// Rank over the rationals by fraction-exact Gaussian elimination.
int exact_rank(const std::vector<IntVec>& vectors);
bool exact_lin_dependent(const std::vector<IntVec>& vectors);
// Some nonzero λ ≥ 0 with Σ λ_i z_i = 0. Decided by enumerating circuits:
// a minimal positively dependent subfamily has a one-dimensional null space
// spanned by a strictly positive vector.
bool exact_pos_dependent(const std::vector<IntVec>& vectors);

std::vector<Vec> to_vecs(const std::vector<IntVec>& v);

// Eigen's QR-based self-adjoint solver; used only as an oracle.
Vec oracle_eigenvalues(const Mat& a);  // non-increasing
Mat oracle_proj_psd(const Mat& a);

// Central differences with a Richardson step, written independently of the library's helpers.
Vec oracle_gradient(const std::function<double(const Vec&)>& f, const Vec& x);

Mat random_symmetric(int m, std::mt19937_64& rng, double scale = 1.0);
Mat random_orthogonal(int m, std::mt19937_64& rng);
// Symmetric matrix with prescribed spectrum, including repeated and zero eigenvalues.
Mat with_spectrum(const Vec& values, std::mt19937_64& rng);

}  // namespace nsdp::testing
