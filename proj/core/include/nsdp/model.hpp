#pragma once

#include "nsdp/linalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nsdp {

// minimize f(x) subject to G(x) ⪰ 0, in callback form.
struct NsdpProblem {
  int n = 0;
  int m = 0;
  std::string name;
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad_f;
  std::function<SymMat(const Vec&)> g;
  std::function<std::vector<SymMat>(const Vec&)> dg;
  bool exact_derivatives = false;

  double f_eval(const Vec& x) const;
  Vec grad_f_eval(const Vec& x) const;
  SymMat g_eval(const Vec& x) const;
  std::vector<SymMat> dg_eval(const Vec& x) const;
};

// c0 + c_linᵀx + ½ xᵀ C_quad x
struct QuadraticFunction {
  double c0 = 0.0;
  Vec c_lin;
  Mat c_quad;

  static QuadraticFunction zero(int n);
  int n() const { return static_cast<int>(c_lin.size()); }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
};

struct QuadTerm {
  int i = 0;  // i ≤ j, zero-based
  int j = 0;
  SymMat coeff;
};

// f quadratic, G(x) = A0 + Σ x_i A_i + Σ_{i≤j} x_i x_j B_ij.
struct MatrixPolyProblem {
  int n = 0;
  int m = 0;
  QuadraticFunction objective;
  SymMat a0;
  std::vector<SymMat> a_lin;
  std::vector<QuadTerm> b_quad;

  static MatrixPolyProblem empty(int n, int m);
  void validate() const;

  SymMat g(const Vec& x) const;
  std::vector<SymMat> dg(const Vec& x) const;
  NsdpProblem to_problem(const std::string& name = {}) const;
};

struct ScalarConstraint {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  static ScalarConstraint from_quadratic(const QuadraticFunction& q);
};

struct DiagonalEmbedding {
  std::vector<ScalarConstraint> constraints;
  NsdpProblem problem;
};

DiagonalEmbedding embed_diagonal_nlp(int n, const std::vector<ScalarConstraint>& g,
                                     const QuadraticFunction& objective);
// Same embedding kept in polynomial form when every g_i is quadratic.
MatrixPolyProblem embed_diagonal_poly(const std::vector<QuadraticFunction>& g,
                                      const QuadraticFunction& objective);

// Callback problem; missing derivatives fall back to central differences.
NsdpProblem make_callback_problem(int n, int m, std::function<double(const Vec&)> f,
                                  std::function<SymMat(const Vec&)> g,
                                  std::function<Vec(const Vec&)> grad_f = {},
                                  std::function<std::vector<SymMat>(const Vec&)> dg = {});

double fd_step(double xi);
std::vector<SymMat> fd_dg(const NsdpProblem& p, const Vec& x);
Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x);

struct DerivativeAudit {
  double dg_error = 0.0;    // ‖dg − FD‖ / (1 + ‖dg‖)
  double grad_error = 0.0;  // same for ∇f
  bool passed(double tol) const { return dg_error <= tol && grad_error <= tol; }
};
DerivativeAudit audit_derivatives(const NsdpProblem& p, const Vec& x);

// DG(x)[d] = Σ d_l D_{x_l}G(x)
SymMat dg_apply(const NsdpProblem& p, const Vec& x, const Vec& d);
SymMat dg_apply(const std::vector<SymMat>& dg, const Vec& d);
// DG(x)*[Y], component l is ⟨D_{x_l}G(x), Y⟩
Vec adjoint_dg(const NsdpProblem& p, const Vec& x, const SymMat& y);
Vec adjoint_dg(const std::vector<SymMat>& dg, const SymMat& y);
// ∇f(x) − DG(x)*[Y]
Vec lagrangian_grad(const NsdpProblem& p, const Vec& x, const SymMat& y);

}  // namespace nsdp

namespace nsdp {

// v_ij(x,E)_l = e_iᵀ D_{x_l}G(x) e_j, from precomputed partials.
Vec v_vector(const std::vector<SymMat>& dg, const Vec& ei, const Vec& ej);
// {v_ii(x,E)} for the columns of e.
std::vector<Vec> v_diagonal(const std::vector<SymMat>& dg, const Mat& e);

}  // namespace nsdp
