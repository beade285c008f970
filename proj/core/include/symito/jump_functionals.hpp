#pragma once

#include <span>

#include "symito/path_calculus.hpp"

namespace symito {

/// Strictly decreasing thresholds eps_1 > ... > eps_N with
/// s_epsilon(eps_n) < 2^(-4n), verified by quadrature at construction.
/// Truncated models reach an exact floor (no jump survives below it) and the
/// sequence then terminates early.
struct TruncationSequence {
  std::vector<double> eps;
  std::vector<double> s_values;
  bool floor_reached = false;
  double floor = 0.0;

  double deepest() const { return eps.back(); }
};

TruncationSequence truncation_sequence(const ProcessSpec& spec,
                                       const FunctionDescriptor& u, int count,
                                       const StateWindow& window = {});

struct CompensatedSum {
  double raw = 0.0;          // sum of mid-size jump increments of F(u(X))
  double compensator = 0.0;  // per-step frozen-state Levy integral
  double m_d = 0.0;          // raw - compensator, identically
};

/// Mid-size jump martingale at threshold eps: jumps with
/// eps < |u(X_s) - u(X_{s-})| < 1 summed, minus the compensator
/// int_0^t int_{eps<|du|<1} (F(u(X_s + y)) - F(u(X_s))) nu(dy) ds.
CompensatedSum compensated_jump_sum(const SamplePath& path,
                                    const FunctionDescriptor& u,
                                    const FunctionDescriptor& F, double eps,
                                    double t, const ProcessSpec& spec,
                                    const CompensatorTable* table = nullptr);

struct JumpLevel {
  double eps = 0.0;
  double raw = 0.0;
  double compensator = 0.0;
  double m_d = 0.0;
};

struct JumpTermReport {
  std::vector<JumpLevel> levels;  // one row per eps_n, at the final time
  std::vector<double> sup_diff;   // sup over checkpoints of |M^d(n+1)-M^d(n)|
  bool diagnostics_monotone = true;
  bool floor_exact = false;  // threshold floor reached: values are exact
  double m_d = 0.0;          // M^d at the deepest level, final time
  double compensator = 0.0;  // A at the deepest level, final time
  bool extrapolated = false;
  double m_d_extrapolated = 0.0;
  double compensator_extrapolated = 0.0;
};

/// Values of (M^d, A) along the truncation sequence with convergence
/// diagnostics. Exact at the floor for truncated models; otherwise the
/// deepest level is reported together with a Richardson extrapolation that
/// is flagged as such.
JumpTermReport m_d_limit(const SamplePath& path, const FunctionDescriptor& u,
                         const FunctionDescriptor& F,
                         const TruncationSequence& seq,
                         std::span<const double> checkpoint_times,
                         const ProcessSpec& spec,
                         std::span<const CompensatorTable* const> tables = {});

/// Big-jump bounded-variation term: sum over jumps with |du| >= 1 of the
/// increments of F(u(X)). The lifetime is infinite, so no killing term.
double big_jump_term(const SamplePath& path, const FunctionDescriptor& u,
                     const FunctionDescriptor& F, double t);

}  // namespace symito
