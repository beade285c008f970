#include "symito/quadrature.hpp"

#include <cmath>

namespace symito {
namespace {

struct Panel {
  double value;
  bool ok;
};

Panel simpson_adapt(const std::function<double(double)>& f, double a,
                    double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth, double* err) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    *err += std::abs(delta);
    return {left + right + delta / 15.0, false};
  }
  if (std::abs(delta) <= 15.0 * tol) {
    *err += std::abs(delta) / 15.0;
    return {left + right + delta / 15.0, true};
  }
  const Panel pl =
      simpson_adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, err);
  const Panel pr =
      simpson_adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, err);
  return {pl.value + pr.value, pl.ok && pr.ok};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, double abs_tol,
                           int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // First pass with the absolute floor, second pass with the relative target
  // once a magnitude estimate exists.
  double err = 0.0;
  Panel p = simpson_adapt(f, a, fa, b, fb, m, fm, whole,
                          std::max(abs_tol, rel_tol * std::abs(whole)),
                          max_depth, &err);
  const double target = std::max(abs_tol, rel_tol * std::abs(p.value));
  if (err > target && std::abs(whole) < std::abs(p.value)) {
    err = 0.0;
    p = simpson_adapt(f, a, fa, b, fb, m, fm, whole, target, max_depth, &err);
  }
  out.value = p.value;
  out.error = err;
  out.converged = p.ok;
  return out;
}

}  // namespace symito
