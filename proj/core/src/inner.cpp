#include "nsdp/solvers.hpp"

#include <cmath>
#include <deque>

namespace nsdp {

InnerResult inner_minimize(const Objective& obj, const Vec& x_start, double grad_tol,
                           int max_iter, const InnerOptions& opt) {
  InnerResult res;
  Vec x = x_start;
  Vec g(x.size());
  double f = obj(x, g);
  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;

  double best_gn = g.norm();
  int since_progress = 0;
  int it = 0;
  res.status = "max_iter";
  for (; it < max_iter; ++it) {
    const double gn = g.norm();
    if (gn <= grad_tol) {
      res.status = "converged";
      break;
    }
    if (gn < best_gn * (1.0 - 1e-3)) {
      best_gn = gn;
      since_progress = 0;
    } else if (++since_progress >= opt.stagnation_window) {
      res.status = "stagnation";
      break;
    }

    // Two-loop recursion.
    Vec q = g;
    std::vector<double> a(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      q *= std::min(1.0, 1.0 / gn);
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Vec dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g * std::min(1.0, 1.0 / gn);
      slope = g.dot(dir);
    }

    double step = 1.0;
    Vec xn, gn_vec(x.size());
    double fn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      xn = x + step * dir;
      fn = obj(xn, gn_vec);
      if (std::isfinite(fn) && fn <= f + opt.c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.status = "stagnation";
      break;
    }
    // No positive curvature along dir: extrapolate, or an unbounded model
    // would crawl toward the radius one unit step at a time.
    if (step == 1.0 && gn_vec.dot(dir) <= slope) {
      Vec xe, ge(x.size());
      while (xn.norm() <= 2.0 * opt.radius) {
        step *= 2.0;
        xe = x + step * dir;
        const double fe = obj(xe, ge);
        if (!std::isfinite(fe) || fe > f + opt.c1 * step * slope || fe >= fn) break;
        xn = xe;
        gn_vec = ge;
        fn = fe;
      }
    }
    const Vec s = xn - x;
    const Vec y = gn_vec - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = xn;
    g = gn_vec;
    f = fn;
    if (x.norm() > opt.radius) {
      res.status = "unbounded";
      ++it;
      break;
    }
  }
  if (res.status == "max_iter" && g.norm() <= grad_tol) res.status = "converged";
  res.x = x;
  res.f = f;
  res.grad_norm = g.norm();
  res.iterations = it;
  return res;
}

}  // namespace nsdp
