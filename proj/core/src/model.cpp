#include "nsdp/model.hpp"

#include "nsdp/errors.hpp"

#include <cmath>
#include <memory>

namespace nsdp {

namespace {

void check_x(const NsdpProblem& p, const Vec& x) {
  if (x.size() != p.n)
    throw DimensionError("point has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(p.n));
}

}  // namespace

double NsdpProblem::f_eval(const Vec& x) const {
  check_x(*this, x);
  return f(x);
}

Vec NsdpProblem::grad_f_eval(const Vec& x) const {
  check_x(*this, x);
  Vec gr = grad_f(x);
  if (gr.size() != n) throw DimensionError("grad_f returned the wrong length");
  return gr;
}

SymMat NsdpProblem::g_eval(const Vec& x) const {
  check_x(*this, x);
  SymMat gx = g(x);
  if (gx.dim() != m) throw DimensionError("G returned the wrong order");
  return gx;
}

std::vector<SymMat> NsdpProblem::dg_eval(const Vec& x) const {
  check_x(*this, x);
  auto d = dg(x);
  if (static_cast<int>(d.size()) != n) throw DimensionError("DG returned the wrong count");
  for (const auto& di : d)
    if (di.dim() != m) throw DimensionError("DG returned a matrix of the wrong order");
  return d;
}

QuadraticFunction QuadraticFunction::zero(int n) {
  return {0.0, Vec::Zero(n), Mat::Zero(n, n)};
}

double QuadraticFunction::value(const Vec& x) const {
  return c0 + c_lin.dot(x) + 0.5 * x.dot(c_quad * x);
}

Vec QuadraticFunction::gradient(const Vec& x) const { return c_lin + c_quad * x; }

MatrixPolyProblem MatrixPolyProblem::empty(int n, int m) {
  MatrixPolyProblem p;
  p.n = n;
  p.m = m;
  p.objective = QuadraticFunction::zero(n);
  p.a0 = SymMat(m);
  p.a_lin.assign(static_cast<size_t>(n), SymMat(m));
  return p;
}

void MatrixPolyProblem::validate() const {
  if (n < 1 || m < 1) throw DimensionError("problem needs n ≥ 1 and m ≥ 1");
  if (objective.c_lin.size() != n || objective.c_quad.rows() != n ||
      objective.c_quad.cols() != n)
    throw DimensionError("objective dimensions do not match n");
  if ((objective.c_quad - objective.c_quad.transpose()).norm() > 1e-12)
    throw DimensionError("C_quad is not symmetric");
  if (a0.dim() != m) throw DimensionError("A0 has the wrong order");
  if (static_cast<int>(a_lin.size()) != n) throw DimensionError("A_lin needs n matrices");
  for (const auto& a : a_lin)
    if (a.dim() != m) throw DimensionError("A_lin matrix has the wrong order");
  for (const auto& b : b_quad) {
    if (b.i < 0 || b.j < b.i || b.j >= n) throw DimensionError("B_quad index out of range");
    if (b.coeff.dim() != m) throw DimensionError("B_quad matrix has the wrong order");
  }
}

SymMat MatrixPolyProblem::g(const Vec& x) const {
  SymMat out = a0;
  for (int i = 0; i < n; ++i)
    if (x(i) != 0.0) out += x(i) * a_lin[i];
  for (const auto& b : b_quad) out += (x(b.i) * x(b.j)) * b.coeff;
  return out;
}

std::vector<SymMat> MatrixPolyProblem::dg(const Vec& x) const {
  std::vector<SymMat> out = a_lin;
  for (const auto& b : b_quad) {
    if (b.i == b.j) {
      out[b.i] += (2.0 * x(b.i)) * b.coeff;
    } else {
      out[b.i] += x(b.j) * b.coeff;
      out[b.j] += x(b.i) * b.coeff;
    }
  }
  return out;
}

NsdpProblem MatrixPolyProblem::to_problem(const std::string& name) const {
  validate();
  auto self = std::make_shared<const MatrixPolyProblem>(*this);
  NsdpProblem p;
  p.n = n;
  p.m = m;
  p.name = name;
  p.f = [self](const Vec& x) { return self->objective.value(x); };
  p.grad_f = [self](const Vec& x) { return self->objective.gradient(x); };
  p.g = [self](const Vec& x) { return self->g(x); };
  p.dg = [self](const Vec& x) { return self->dg(x); };
  p.exact_derivatives = true;
  return p;
}

ScalarConstraint ScalarConstraint::from_quadratic(const QuadraticFunction& q) {
  return {[q](const Vec& x) { return q.value(x); },
          [q](const Vec& x) { return q.gradient(x); }};
}

DiagonalEmbedding embed_diagonal_nlp(int n, const std::vector<ScalarConstraint>& g,
                                     const QuadraticFunction& objective) {
  if (g.empty()) throw DimensionError("embed_diagonal_nlp: need at least one constraint");
  if (objective.n() != n) throw DimensionError("embed_diagonal_nlp: objective length");
  const int m = static_cast<int>(g.size());
  DiagonalEmbedding e;
  e.constraints = g;
  e.problem.n = n;
  e.problem.m = m;
  e.problem.f = [objective](const Vec& x) { return objective.value(x); };
  e.problem.grad_f = [objective](const Vec& x) { return objective.gradient(x); };
  e.problem.g = [g, m](const Vec& x) {
    SymMat out(m);
    for (int i = 0; i < m; ++i) out.set(i, i, g[i].value(x));
    return out;
  };
  e.problem.dg = [g, n, m](const Vec& x) {
    std::vector<SymMat> out(static_cast<size_t>(n), SymMat(m));
    for (int i = 0; i < m; ++i) {
      const Vec gi = g[i].gradient(x);
      for (int l = 0; l < n; ++l) out[l].set(i, i, gi(l));
    }
    return out;
  };
  e.problem.exact_derivatives = true;
  return e;
}

MatrixPolyProblem embed_diagonal_poly(const std::vector<QuadraticFunction>& g,
                                      const QuadraticFunction& objective) {
  if (g.empty()) throw DimensionError("embed_diagonal_poly: need at least one constraint");
  const int n = objective.n();
  const int m = static_cast<int>(g.size());
  MatrixPolyProblem p = MatrixPolyProblem::empty(n, m);
  p.objective = objective;
  for (int i = 0; i < m; ++i) {
    if (g[i].n() != n) throw DimensionError("embed_diagonal_poly: constraint length");
    p.a0.set(i, i, g[i].c0);
    for (int l = 0; l < n; ++l) p.a_lin[l].set(i, i, g[i].c_lin(l));
  }
  // ½ xᵀCx = Σ_l ½C_ll x_l² + Σ_{l<k} C_lk x_l x_k
  for (int l = 0; l < n; ++l)
    for (int k = l; k < n; ++k) {
      SymMat b(m);
      bool any = false;
      for (int i = 0; i < m; ++i) {
        const double c = (l == k) ? 0.5 * g[i].c_quad(l, l) : g[i].c_quad(l, k);
        if (c != 0.0) {
          b.set(i, i, c);
          any = true;
        }
      }
      if (any) p.b_quad.push_back({l, k, b});
    }
  return p;
}

double fd_step(double xi) { return 1e-6 * (1.0 + std::abs(xi)); }

std::vector<SymMat> fd_dg(const NsdpProblem& p, const Vec& x) {
  std::vector<SymMat> out;
  out.reserve(static_cast<size_t>(p.n));
  for (int l = 0; l < p.n; ++l) {
    const double h = fd_step(x(l));
    Vec xp = x, xm = x;
    xp(l) += h;
    xm(l) -= h;
    out.push_back((p.g(xp) - p.g(xm)) * (1.0 / (xp(l) - xm(l))));
  }
  return out;
}

Vec fd_grad(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec out(x.size());
  for (int l = 0; l < x.size(); ++l) {
    const double h = fd_step(x(l));
    Vec xp = x, xm = x;
    xp(l) += h;
    xm(l) -= h;
    out(l) = (f(xp) - f(xm)) / (xp(l) - xm(l));
  }
  return out;
}

NsdpProblem make_callback_problem(int n, int m, std::function<double(const Vec&)> f,
                                  std::function<SymMat(const Vec&)> g,
                                  std::function<Vec(const Vec&)> grad_f,
                                  std::function<std::vector<SymMat>(const Vec&)> dg) {
  NsdpProblem p;
  p.n = n;
  p.m = m;
  p.f = f;
  p.g = g;
  p.exact_derivatives = static_cast<bool>(grad_f) && static_cast<bool>(dg);
  p.grad_f = grad_f ? grad_f : [f](const Vec& x) { return fd_grad(f, x); };
  if (dg) {
    p.dg = dg;
  } else {
    NsdpProblem shell;
    shell.n = n;
    shell.m = m;
    shell.g = g;
    p.dg = [shell](const Vec& x) { return fd_dg(shell, x); };
  }
  return p;
}

DerivativeAudit audit_derivatives(const NsdpProblem& p, const Vec& x) {
  const auto exact = p.dg_eval(x);
  const auto approx = fd_dg(p, x);
  double diff = 0.0, norm = 0.0;
  for (int l = 0; l < p.n; ++l) {
    diff += std::pow((exact[l] - approx[l]).fro(), 2);
    norm += std::pow(exact[l].fro(), 2);
  }
  DerivativeAudit a;
  a.dg_error = std::sqrt(diff) / (1.0 + std::sqrt(norm));
  const Vec gr = p.grad_f_eval(x);
  a.grad_error = (gr - fd_grad(p.f, x)).norm() / (1.0 + gr.norm());
  return a;
}

SymMat dg_apply(const std::vector<SymMat>& dg, const Vec& d) {
  if (static_cast<int>(dg.size()) != d.size()) throw DimensionError("dg_apply: length");
  if (dg.empty()) throw DimensionError("dg_apply: empty derivative list");
  SymMat out(dg.front().dim());
  for (int l = 0; l < d.size(); ++l) out += d(l) * dg[l];
  return out;
}

SymMat dg_apply(const NsdpProblem& p, const Vec& x, const Vec& d) {
  return dg_apply(p.dg_eval(x), d);
}

Vec adjoint_dg(const std::vector<SymMat>& dg, const SymMat& y) {
  Vec out(static_cast<int>(dg.size()));
  for (size_t l = 0; l < dg.size(); ++l) out(static_cast<int>(l)) = inner(dg[l], y);
  return out;
}

Vec adjoint_dg(const NsdpProblem& p, const Vec& x, const SymMat& y) {
  if (y.dim() != p.m) throw DimensionError("adjoint_dg: multiplier has the wrong order");
  return adjoint_dg(p.dg_eval(x), y);
}

Vec lagrangian_grad(const NsdpProblem& p, const Vec& x, const SymMat& y) {
  return p.grad_f_eval(x) - adjoint_dg(p, x, y);
}

}  // namespace nsdp

namespace nsdp {

Vec v_vector(const std::vector<SymMat>& dg, const Vec& ei, const Vec& ej) {
  Vec v(static_cast<int>(dg.size()));
  for (size_t l = 0; l < dg.size(); ++l)
    v(static_cast<int>(l)) = ei.dot(dg[l].mat() * ej);
  return v;
}

std::vector<Vec> v_diagonal(const std::vector<SymMat>& dg, const Mat& e) {
  std::vector<Vec> out;
  out.reserve(static_cast<size_t>(e.cols()));
  for (int i = 0; i < e.cols(); ++i) out.push_back(v_vector(dg, e.col(i), e.col(i)));
  return out;
}

}  // namespace nsdp
