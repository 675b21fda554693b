#include "nsdp/solvers.hpp"

#include "nsdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nsdp {

double al_value(const NsdpProblem& p, const Vec& x, double rho, const SymMat& y_tilde) {
  const SymMat shifted = -p.g_eval(x) + (1.0 / rho) * y_tilde;
  const double pr = proj_psd(shifted).fro();
  return p.f_eval(x) + 0.5 * rho * pr * pr - y_tilde.fro() * y_tilde.fro() / (2.0 * rho);
}

Vec al_gradient(const NsdpProblem& p, const Vec& x, double rho, const SymMat& y_tilde) {
  const SymMat y = rho * proj_psd(-p.g_eval(x) + (1.0 / rho) * y_tilde);
  return p.grad_f_eval(x) - adjoint_dg(p, x, y);
}

namespace {

// One decomposition serves value, gradient and the multiplier.
struct AlEval {
  double value;
  Vec grad;
  SymMat y;  // ρ Π(−G + Ỹ/ρ)
};

AlEval al_eval(const NsdpProblem& p, const Vec& x, double rho, const SymMat& y_tilde) {
  const SymMat shifted = -p.g_eval(x) + (1.0 / rho) * y_tilde;
  const SymMat pr = proj_psd(shifted);
  AlEval e;
  const double n = pr.fro();
  e.value = p.f_eval(x) + 0.5 * rho * n * n - y_tilde.fro() * y_tilde.fro() / (2.0 * rho);
  e.y = rho * pr;
  e.grad = p.grad_f_eval(x) - adjoint_dg(p, x, e.y);
  return e;
}

struct OuterStep {
  IterationRecord rec;
  InnerResult inner;
};

// One outer step for a fixed (ρ, Ỹ): inner solve, then Y, V and δ.
OuterStep outer_step(const NsdpProblem& p, const Vec& x_prev, double rho, const SymMat& y_tilde,
                     double eps, int inner_max_iter, const InnerOptions& iopt) {
  const Objective obj = [&](const Vec& x, Vec& g) {
    AlEval e = al_eval(p, x, rho, y_tilde);
    g = std::move(e.grad);
    return e.value;
  };
  OuterStep s;
  s.inner = inner_minimize(obj, x_prev, eps, inner_max_iter, iopt);
  const Vec& x = s.inner.x;
  const SymMat scaled = (1.0 / rho) * y_tilde;
  const SymMat pr = proj_psd(-p.g_eval(x) + scaled);
  IterationRecord& r = s.rec;
  r.x = x;
  r.y = rho * pr;
  r.y_tilde = y_tilde;
  r.delta = pr - scaled;  // V^k
  r.delta_x = lagrangian_grad(p, x, r.y);
  r.rho = rho;
  r.v_norm = r.delta.fro();
  r.inner_tol = eps;
  r.inner = {s.inner.iterations, s.inner.grad_norm, s.inner.status};
  r.residual = kkt_residual(p, x, r.y);
  return s;
}

bool reached_target(const IterationRecord& r, double target) {
  return r.residual.max() <= target && r.v_norm <= target;
}

void check_start(const NsdpProblem& p, const Vec& x0) {
  if (x0.size() != p.n) throw DimensionError("starting point has the wrong length");
  if (!x0.allFinite()) throw Error("starting point is not finite");
}

}  // namespace

PenaltyConfig PenaltyConfig::geometric(int max_outer, double target_tol, double rho1,
                                       double factor) {
  PenaltyConfig c;
  c.target_tol = target_tol;
  double rho = rho1, eps = 0.1;
  for (int k = 0; k < max_outer; ++k) {
    c.rho.push_back(rho);
    c.inner_tol.push_back(std::max(eps, 0.1 * target_tol));
    rho *= factor;
    eps /= factor;
  }
  return c;
}

SolverTrace solve_external_penalty(const NsdpProblem& p, const Vec& x0, const PenaltyConfig& cfg) {
  check_start(p, x0);
  if (cfg.rho.empty() || cfg.rho.size() != cfg.inner_tol.size())
    throw Error("penalty: schedules must be nonempty and of equal length");
  for (size_t k = 0; k < cfg.rho.size(); ++k)
    if (!(cfg.rho[k] > 0) || !(cfg.inner_tol[k] > 0))
      throw Error("penalty: schedules must be positive");

  SolverTrace t;
  t.solver = "penalty";
  t.n = p.n;
  t.m = p.m;
  const SymMat zero(p.m);
  Vec x = x0;
  for (size_t k = 0; k < cfg.rho.size(); ++k) {
    OuterStep s = outer_step(p, x, cfg.rho[k], zero, cfg.inner_tol[k], cfg.inner_max_iter, cfg.inner);
    s.rec.k = static_cast<int>(k) + 1;
    if (k > 0) s.rec.rho_frozen = cfg.rho[k] == cfg.rho[k - 1];
    x = s.rec.x;
    t.records.push_back(s.rec);
    if (s.inner.status == "unbounded") {
      t.termination = termination::kUnbounded;
      t.message = "penalty subproblem left the radius " + std::to_string(cfg.inner.radius);
      return t;
    }
    if (reached_target(s.rec, cfg.target_tol)) {
      t.termination = termination::kTarget;
      return t;
    }
    if (s.inner.status == "stagnation" && s.inner.grad_norm > cfg.inner_tol[k]) {
      t.termination = termination::kStagnation;
      t.message = "inner solver stalled at gradient norm " + std::to_string(s.inner.grad_norm);
      return t;
    }
  }
  t.termination = termination::kMaxIter;
  return t;
}

SolverTrace solve_external_penalty(const NsdpProblem& p, const Vec& x0,
                                   const std::vector<double>& rho_schedule,
                                   const std::vector<double>& inner_tol_schedule, int max_outer) {
  PenaltyConfig c;
  const size_t k = std::min({rho_schedule.size(), inner_tol_schedule.size(),
                             static_cast<size_t>(std::max(max_outer, 0))});
  c.rho.assign(rho_schedule.begin(), rho_schedule.begin() + static_cast<long>(k));
  c.inner_tol.assign(inner_tol_schedule.begin(), inner_tol_schedule.begin() + static_cast<long>(k));
  return solve_external_penalty(p, x0, c);
}

void AlConfig::validate() const {
  if (!(theta > 0 && theta < 1)) throw Error("AlConfig: theta must lie in (0,1)");
  if (!(gamma > 1)) throw Error("AlConfig: gamma must exceed 1");
  if (!(safeguard_radius >= 0)) throw Error("AlConfig: safeguard radius must be nonnegative");
  if (!(rho1 > 0)) throw Error("AlConfig: rho1 must be positive");
  if (!(eps0 > 0) || !(eps_ratio > 0 && eps_ratio <= 1))
    throw Error("AlConfig: epsilon schedule must be positive and nonincreasing");
}

double AlConfig::epsilon(int k, double target_tol) const {
  return std::max(eps0 * std::pow(eps_ratio, k - 1), target_tol);
}

SolverTrace solve_augmented_lagrangian(const NsdpProblem& p, const Vec& x0, const AlConfig& cfg,
                                       double target_tol, int max_outer) {
  cfg.validate();
  check_start(p, x0);
  SolverTrace t;
  t.solver = "al";
  t.n = p.n;
  t.m = p.m;
  SymMat y_tilde = cfg.y_tilde1 ? *cfg.y_tilde1 : SymMat(p.m);
  if (y_tilde.dim() != p.m) throw DimensionError("AlConfig: initial multiplier order");
  double rho = cfg.rho1;
  double v_prev = std::numeric_limits<double>::infinity();
  Vec x = x0;
  for (int k = 1; k <= max_outer; ++k) {
    const double eps = cfg.epsilon(k, target_tol);
    OuterStep s = outer_step(p, x, rho, y_tilde, eps, cfg.inner_max_iter, cfg.inner);
    IterationRecord& r = s.rec;
    r.k = k;
    x = r.x;
    r.rho_frozen = (k == 1) || r.v_norm <= cfg.theta * v_prev;
    t.records.push_back(r);
    if (s.inner.status == "unbounded") {
      t.termination = termination::kUnbounded;
      t.message = "subproblem left the radius " + std::to_string(cfg.inner.radius);
      return t;
    }
    if (reached_target(r, target_tol)) {
      t.termination = termination::kTarget;
      return t;
    }
    if (s.inner.status == "stagnation" && s.inner.grad_norm > eps) {
      t.termination = termination::kStagnation;
      t.message = "inner solver stalled at gradient norm " + std::to_string(s.inner.grad_norm);
      return t;
    }
    if (!r.rho_frozen) rho *= cfg.gamma;
    v_prev = r.v_norm;
    switch (cfg.policy) {
      case SafeguardPolicy::Projection: {
        // Y is PSD already, so projecting onto the cone-ball intersection is a rescale.
        const double n = r.y.fro();
        if (cfg.safeguard_radius == 0.0 || n == 0.0) {
          y_tilde = SymMat(p.m);
        } else {
          y_tilde = n <= cfg.safeguard_radius ? r.y : (cfg.safeguard_radius / n) * r.y;
        }
        break;
      }
      case SafeguardPolicy::Zero:
        y_tilde = SymMat(p.m);
        break;
      case SafeguardPolicy::Hold:
        break;
    }
  }
  t.termination = termination::kMaxIter;
  return t;
}

namespace {

Mat damped_bfgs(const Mat& h, const Vec& s, const Vec& y, double cap) {
  const Vec hs = h * s;
  const double shs = s.dot(hs);
  if (s.norm() <= 1e-14 || shs <= 1e-300) return h;
  const double sy = s.dot(y);
  const double theta = sy >= 0.2 * shs ? 1.0 : 0.8 * shs / (shs - sy);
  const Vec r = theta * y + (1.0 - theta) * hs;
  Mat hn = h + r * r.transpose() / s.dot(r) - hs * hs.transpose() / shs;
  hn = 0.5 * (hn + hn.transpose());
  if (!hn.allFinite() || hn.norm() > cap) return Mat::Identity(h.rows(), h.cols());
  return hn;
}

}  // namespace

SolverTrace solve_sqp(const NsdpProblem& p, const Vec& x0, const SymMat& y0, const SqpConfig& cfg,
                      double target_tol, int max_iter) {
  check_start(p, x0);
  if (y0.dim() != p.m) throw DimensionError("solve_sqp: initial multiplier order");
  if (!(cfg.armijo_sigma > 0 && cfg.armijo_sigma < 1))
    throw Error("solve_sqp: Armijo constant must lie in (0,1)");
  SolverTrace t;
  t.solver = "sqp";
  t.n = p.n;
  t.m = p.m;
  Mat h = cfg.h0 ? *cfg.h0 : Mat::Identity(p.n, p.n);
  if (h.rows() != p.n || h.cols() != p.n) throw DimensionError("solve_sqp: H0 has the wrong size");
  Vec x = x0;
  SymMat y = y0;
  const double sub_target = std::max(cfg.sub_target_factor * target_tol, 1e-13);

  for (int k = 1; k <= max_iter; ++k) {
    const Vec gf = p.grad_f_eval(x);
    const SymMat gx = p.g_eval(x);
    const std::vector<SymMat> dg = p.dg_eval(x);

    // Lin-QP: min ½dᵀHd + ∇fᵀd  s.t.  G(x) + DG(x)d ⪰ 0.
    MatrixPolyProblem sub = MatrixPolyProblem::empty(p.n, p.m);
    sub.objective = {0.0, gf, h};
    sub.a0 = gx;
    sub.a_lin = dg;
    const NsdpProblem subp = sub.to_problem("lin-qp");
    AlConfig scfg = cfg.sub;
    scfg.y_tilde1 = y;
    if (y.fro() > scfg.safeguard_radius && y.fro() > 0)
      scfg.y_tilde1 = (scfg.safeguard_radius / y.fro()) * y;
    const SolverTrace st = solve_augmented_lagrangian(subp, Vec::Zero(p.n), scfg, sub_target,
                                                      cfg.sub_max_outer);
    const IterationRecord& sr = st.last();
    const Vec d = sr.x;
    const SymMat y_next = sr.y;

    IterationRecord r;
    r.k = k;
    r.x = x;
    r.y = y_next;
    r.y_tilde = y;
    r.delta = dg_apply(dg, d) + sr.delta;  // DG(x)d plus the subproblem's V
    r.delta_x = lagrangian_grad(p, x, y_next);
    r.rho = sr.rho;
    r.v_norm = d.norm();
    r.inner_tol = sub_target;
    r.inner = {static_cast<int>(st.records.size()), sr.residual.stationarity, st.termination};
    r.residual = kkt_residual(p, x, y_next);

    if (!st.converged() && sr.residual.feasibility > std::sqrt(sub_target)) {
      r.step = 0.0;
      t.records.push_back(r);
      // Thm. 4.1 item 1: the AL limit is stationary for the infeasibility measure.
      const SymMat viol = proj_psd(-subp.g_eval(d));
      const Vec infeas_grad = -adjoint_dg(dg, viol);
      std::ostringstream os;
      os << "linearized constraint appears infeasible: min ||Pi(-G-DGd)|| = "
         << sr.residual.feasibility << ", gradient of the infeasibility measure "
         << infeas_grad.norm();
      t.termination = termination::kSubproblem;
      t.message = os.str();
      return t;
    }

    if (d.norm() <= target_tol) {
      r.step = 0.0;
      t.records.push_back(r);
      t.termination = termination::kTarget;
      return t;
    }

    const double f0 = p.f_eval(x);
    const double slope = gf.dot(d);
    double alpha = 1.0;
    bool ok = false;
    for (int hcount = 0; hcount <= cfg.max_halvings; ++hcount) {
      if (p.f_eval(x + alpha * d) - f0 <= cfg.armijo_sigma * alpha * slope) {
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    r.step = ok ? alpha : 0.0;
    t.records.push_back(r);
    if (!ok) {
      t.termination = termination::kLineSearch;
      t.message = "Armijo backtracking failed after " + std::to_string(cfg.max_halvings) +
                  " halvings";
      return t;
    }
    const Vec xn = x + alpha * d;
    if (cfg.h_policy == HessianPolicy::DampedBfgs) {
      const Vec s = xn - x;
      const Vec yv = lagrangian_grad(p, xn, y_next) - lagrangian_grad(p, x, y_next);
      h = damped_bfgs(h, s, yv, cfg.h_cap);
    }
    x = xn;
    y = y_next;
  }
  t.termination = termination::kMaxIter;
  return t;
}

}  // namespace nsdp
