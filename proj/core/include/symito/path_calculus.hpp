#pragma once

#include <functional>
#include <span>

#include "symito/process.hpp"

namespace symito {

/// An additive-functional trajectory evaluated on a subsequence of the
/// parent path's grid. values[0] == 0 always (additive functionals start
/// at zero) and eval_idx[0] == 0.
struct AfPath {
  const SamplePath* parent = nullptr;
  std::vector<std::size_t> eval_idx;
  std::vector<double> values;

  std::size_t points() const { return values.size(); }
  double time_at(std::size_t j) const {
    return parent->time_at(eval_idx[j]);
  }
  double back() const { return values.back(); }
  /// Value at the eval point whose grid time equals t.
  double at_time(double t) const;
};

/// Eval grid helpers. All grids start at index 0 and are strictly
/// increasing.
std::vector<std::size_t> full_grid(const SamplePath& path);
/// Roughly sqrt(n) points plus both endpoints; the default reporting grid.
std::vector<std::size_t> sqrt_grid(std::size_t n_steps);
/// Uniformly spaced grid with the given number of segments.
std::vector<std::size_t> uniform_grid(std::size_t n_steps, std::size_t segments);
/// Grid containing exactly {0} and the grid indices of the given times.
std::vector<std::size_t> checkpoint_grid(const SamplePath& path,
                                         std::span<const double> times);
/// Grid index of time t; throws std::invalid_argument when t is not a grid
/// point of the path.
std::size_t grid_index(const SamplePath& path, double t);

/// Forward Euler-Ito sum: value at eval point k is
/// sum_{j<k} f_left[j] * (A_{j+1} - A_j). f_left has one entry per
/// integrator segment, sampled at the segment's left endpoint.
AfPath ito_integral(std::span<const double> f_left, const AfPath& integrator);

struct FukushimaParts {
  AfPath m_uc;  // continuous martingale part
  AfPath m_uj;  // compensated jump martingale part
  AfPath n_u;   // zero-energy remainder, defined as lhs - m_uc - m_uj
};

/// Pathwise decomposition of u(X) - u(X_0) on the full grid. The jump
/// compensator is evaluated per step with the step's left state frozen;
/// pass a table built for cuts (0, +inf) to amortize the quadrature.
FukushimaParts fukushima_decompose(const SamplePath& path,
                                   const FunctionDescriptor& u,
                                   const ProcessSpec& spec,
                                   const CompensatorTable* table = nullptr);

enum class QvMode { Realized, Predictable };

/// Realized mode: sum of squared increments of m over its eval segments.
/// Predictable mode: sum of u'(X)^2 sigma2 dt over the underlying grid.
AfPath quadratic_variation(const AfPath& m, QvMode mode,
                           const FunctionDescriptor& u,
                           const ProcessSpec& spec);

enum class StartProtocol { FixedPoint, StationaryWindow };

struct EnergyEstimate {
  double value = 0.0;
  double se = 0.0;
  int n_paths = 0;
};

/// e(M) estimated as (1/2t) * mean over seeds of M_t^2, with paths started
/// either from the model's fixed start state or from the state reached after
/// a burn-in window (single long path, initial segment discarded).
EnergyEstimate energy_estimate(
    const std::function<AfPath(const SamplePath&)>& builder,
    const ProcessSpec& spec, double t, int n_paths, double dt,
    std::uint64_t seed_base, StartProtocol start = StartProtocol::FixedPoint,
    double burn_in = 0.0);

}  // namespace symito
