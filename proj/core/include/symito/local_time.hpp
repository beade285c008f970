#pragma once

#include <functional>

#include "symito/level_integration.hpp"

namespace symito {

/// Local time of u(X) at level a on the eval grid:
///   L^a = -2 Gamma(Z^a) + 2 int_0^t 1{u(X_{s-}) <= a} d(cN^u)_s,
/// with cN^u = Gamma(M^{u,c}). The correction integral is a pathwise
/// Stieltjes sum against the computed cN^u trajectory (cN^u is of bounded
/// variation for the implemented catalog); it vanishes statistically for
/// symmetric Levy models with the identity map but the code path stays live.
AfPath local_time(const SamplePath& path, const FunctionDescriptor& u,
                  double a, std::span<const std::size_t> eval_idx,
                  const ProcessSpec& spec);

/// Measurable version of the local time over a whole level grid, sharing
/// one backward pass across levels.
struct LocalTimeField {
  std::vector<double> levels;
  std::vector<std::size_t> eval_idx;
  std::vector<double> data;  // row-major [level][eval]

  double at(std::size_t level, std::size_t eval) const {
    return data[level * eval_idx.size() + eval];
  }
};

LocalTimeField local_time_field(const SamplePath& path,
                                const FunctionDescriptor& u,
                                std::span<const double> levels,
                                std::span<const std::size_t> eval_idx,
                                const ProcessSpec& spec);

struct OccupationPair {
  double lhs = 0.0;  // int f(x) L^x_t dx, trapezoid over the level grid
  double rhs = 0.0;  // int_0^t f(u(X_s)) d<M^{u,c}>_s, predictable form
};

OccupationPair occupation_check(const SamplePath& path,
                                const FunctionDescriptor& u,
                                const std::function<double(double)>& f,
                                double t, const ProcessSpec& spec,
                                std::size_t level_cells = 256);

struct KernelEstimate {
  double value = 0.0;
  bool bandwidth_warning = false;  // h below twice the typical increment
};

/// Independent occupation-density estimator
///   (1/2h) int_0^t 1{|u(X_s) - a| < h} d<M^{u,c}>_s.
KernelEstimate kernel_local_time_oracle(const SamplePath& path,
                                        const FunctionDescriptor& u, double a,
                                        double h, double t,
                                        const ProcessSpec& spec);

/// Support statistic int_0^t (u(X_s) - a)^4 dL^a_s as a Stieltjes sum over
/// a fine eval grid; near zero when dL^a sits on {u(X) = a}.
double support_check(const SamplePath& path, const FunctionDescriptor& u,
                     double a, double t, const ProcessSpec& spec,
                     std::size_t eval_segments = 1000);

/// Right-hand side of the level integration against local time:
///   -1/2 int f(z) d_z L^z_t = int f(z) d_z Gamma^z_t
///                             - int_0^t f(u(X_s)) d(cN^u)_s.
double integrate_levels_localtime(const std::function<double(double)>& f,
                                  const SamplePath& path,
                                  const FunctionDescriptor& u, double t,
                                  const ProcessSpec& spec);

}  // namespace symito
