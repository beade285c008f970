#pragma once

#include <functional>

namespace symito {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  bool converged = true;
};

/// Adaptive Simpson integration of f on [a, b].
///
/// Terminates a panel once the Richardson estimate of its error is below
/// rel_tol * |running value| + abs_tol (split across subpanels). Integrands
/// with jump discontinuities are admissible; they just cost more panels.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-10,
                           double abs_tol = 1e-14, int max_depth = 48);

}  // namespace symito
