#pragma once

#include <functional>
#include <span>
#include <string>

#include "symito/path_calculus.hpp"

namespace symito {

/// A pure recipe for a continuous martingale additive functional: its value
/// at t_k is sum_{i<k} coeff(state_i) * dB_i, where state_i is the path
/// value at the step's left endpoint and dB_i the continuous increment of
/// the chosen component. Builders only ever read the continuous channel, so
/// every builder in the catalog is continuous by construction; jump MAFs go
/// through the compensator machinery instead. Because the recipe carries no
/// hidden state it can be re-evaluated verbatim on a reversed path.
struct MafBuilder {
  enum class Kind {
    ContPart,         // M^{u,c}: coeff = u'(x)
    LevelIndicator,   // Z^a(u):  coeff = 1{u(x) <= a} u'(x)
    LevelIndicator2,  // 2-d Z^a: coeff = 1{x <= a1, y <= a2}
    Weighted,         // (f o u) * M^{u,c}: coeff = f(u(x)) u'(x)
    Custom1,          // free-form coeff(x)
    Custom2,          // free-form coeff(x, y)
  };

  Kind kind = Kind::ContPart;
  FunctionDescriptor u;
  FunctionDescriptor weight;
  double level = 0.0, level2 = 0.0;
  int component = 0;
  std::function<double(double)> fn1;
  std::function<double(double, double)> fn2;

  static MafBuilder cont_part(FunctionDescriptor u);
  static MafBuilder level_indicator(FunctionDescriptor u, double a);
  static MafBuilder level_indicator2(double a1, double a2, int component);
  static MafBuilder weighted(FunctionDescriptor f, FunctionDescriptor u);
  static MafBuilder custom(std::function<double(double)> coeff);
  static MafBuilder custom2(std::function<double(double, double)> coeff,
                            int component);

  double coeff(const double* state, int dim) const;
  /// Value at grid point k on the given path.
  double evaluate(const SamplePath& path, std::size_t k) const;
};

/// Time reversal on [0, t_k]: the reversed path samples the left limits of
/// the original backwards, r(s) = X((t_k - s)-). Continuous increments are
/// the negated originals in reverse order; a jump at grid point g in [1, k-1]
/// reappears at reversed point k - g with negated size (a jump sitting
/// exactly at t_k leaves no trace, its left limit being the reversed start).
/// Reversed values are rebuilt by cumulative sums so the closure invariant
/// holds exactly on the reversed object.
SamplePath reverse_path(const SamplePath& path, std::size_t k);

/// The zero-energy image of a continuous martingale AF,
///   Gamma_t(M) = -1/2 (M_t + M_t o r_t),
/// evaluated by reconstructing the reversed path at every requested eval
/// point and re-running the builder on it: Theta(n * m) for m eval points.
AfPath gamma(const MafBuilder& builder, const SamplePath& path,
             std::span<const std::size_t> eval_idx);

/// Z^a(u)_t = int_0^t 1{u(X_{s-}) <= a} dM^{u,c}_s on the full grid.
AfPath z_a(const SamplePath& path, const FunctionDescriptor& u, double a);

/// Gamma^a = Gamma(Z^a(u)).
AfPath gamma_a(const SamplePath& path, const FunctionDescriptor& u, double a,
               std::span<const std::size_t> eval_idx);

/// Stochastic integral against a zero-energy functional:
///   (f * Gamma(M))_t = Gamma_t((f o u) * M) - 1/2 <M^{fu,c}, M>_t,
/// the bracket computed predictably through the chain rule
/// f'(u) u' * coeff_M * sigma2 dt.
AfPath gamma_integral(const FunctionDescriptor& f, const FunctionDescriptor& u,
                      const MafBuilder& m, const SamplePath& path,
                      std::span<const std::size_t> eval_idx,
                      const ProcessSpec& spec);

/// Batched Gamma^{z} for a whole sorted level set: one backward pass shared
/// by all levels (each step is binned by u at the forward left endpoint and
/// at the backward left limit), O(n log L + m L) total.
struct LevelGammaField {
  std::vector<double> levels;
  std::vector<std::size_t> eval_idx;
  std::vector<double> data;  // row-major [level][eval]

  double at(std::size_t level, std::size_t eval) const {
    return data[level * eval_idx.size() + eval];
  }
  std::size_t n_levels() const { return levels.size(); }
};

LevelGammaField gamma_levels(const SamplePath& path,
                             const FunctionDescriptor& u,
                             std::span<const double> levels,
                             std::span<const std::size_t> eval_idx);

}  // namespace symito
