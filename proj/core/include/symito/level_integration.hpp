#pragma once

#include <array>
#include <functional>
#include <optional>

#include "symito/nakao.hpp"

namespace symito {

/// Sorted, strictly increasing level set z_0 < ... < z_N.
struct LevelGrid {
  std::vector<double> z;

  LevelGrid() = default;
  explicit LevelGrid(std::vector<double> levels);
  static LevelGrid uniform(double lo, double hi, std::size_t cells);
  /// Levels spanning [min u(X) - h, max u(X) + h] with h one grid cell.
  static LevelGrid spanning(const SamplePath& path,
                            const FunctionDescriptor& u, std::size_t cells);

  std::size_t cells() const { return z.size() - 1; }
  double lo() const { return z.front(); }
  double hi() const { return z.back(); }
};

/// Step function sum f_i 1_{(z_i, z_{i+1}]}; zero outside (z_0, z_N].
struct ElementaryFunction {
  LevelGrid grid;
  std::vector<double> coeff;  // one per cell

  ElementaryFunction(LevelGrid g, std::vector<double> c);
  static ElementaryFunction constant_on(LevelGrid g, double c);

  double operator()(double x) const;
};

/// Level integration of a step function against a -> Gamma^a at time t:
/// sum_i f_i (Gamma^{z_{i+1}}_t - Gamma^{z_i}_t), all levels sharing one
/// backward pass.
double integrate_levels_elementary(const ElementaryFunction& f,
                                   const SamplePath& path,
                                   const FunctionDescriptor& u, double t);

/// General locally bounded integrand, computed through the identity
/// int f(z) d_z Gamma^z_t = Gamma_t((f o u) * M^{u,c}).
double integrate_levels(const FunctionDescriptor& f, const SamplePath& path,
                        const FunctionDescriptor& u, double t);
double integrate_levels_fn(const std::function<double(double)>& f,
                           const SamplePath& path, const FunctionDescriptor& u,
                           double t);

/// Occupation density of u on the level axis: the measure U(z) dz with
/// int g(u(x)) mu_<M^{u,c}>(dx) = int g(z) U(z) dz. Closed form sigma2 for
/// the identity map; a binned Monte Carlo ratio estimate otherwise.
struct UDensity {
  bool closed_form = false;
  double sigma2 = 0.0;
  std::vector<double> z;      // bin edges (size bins + 1)
  std::vector<double> value;  // per bin
  std::vector<double> se;

  double operator()(double x) const;
};

struct UDensityConfig {
  double state_halfwidth = 4.0;  // binning window for the ratio estimator
  int state_bins = 161;
  double z_lo = -4.0, z_hi = 4.0;
  int z_bins = 161;
  double horizon = 40.0;
  double dt = 1e-3;
  int n_paths = 8;
  std::uint64_t seed = 9001;
};

UDensity u_density(const ProcessSpec& spec, const FunctionDescriptor& u,
                   const UDensityConfig& cfg = {});

/// ||f||_k = (int_{-k}^{k} f(z)^2 U(z) dz)^(1/2), the norm of the level
/// integrand truncated at +-k. Divergent integrals report +inf.
double norm_k(const std::function<double(double)>& f, const ProcessSpec& spec,
              const FunctionDescriptor& u, int k,
              const UDensity* density = nullptr);

/// [f - g] = sum_{k<=k_max} 2^{-k} (1 and ||f-g||_k), truncation tail
/// bounded by 2^{-k_max}.
double metric_bracket(const std::function<double(double)>& f,
                      const std::function<double(double)>& g,
                      const ProcessSpec& spec, const FunctionDescriptor& u,
                      int k_max, const UDensity* density = nullptr);

/// Axis-aligned half-open box ]lo, hi] in 2-d.
struct Box2 {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  bool contains(double x, double y) const {
    return x > lo[0] && x <= hi[0] && y > lo[1] && y <= hi[1];
  }
};

/// Linear combination of box indicators.
struct Elementary2 {
  std::vector<Box2> boxes;
  std::vector<double> coeff;

  double operator()(double x, double y) const;
};

/// Alternating corner sum of phi over the half-open box ]lo, hi]:
/// phi(hi1,hi2) - phi(lo1,hi2) - phi(hi1,lo2) + phi(lo1,lo2).
double box_increment(const std::function<double(double, double)>& phi,
                     const Box2& box);

/// Box integration against a -> Gamma^a(u^i) for the coordinate pair on a
/// 2-d path: each box contributes its alternating corner sum of
/// Gamma evaluated at the box corners.
double integrate_levels_multidim(const Elementary2& f, const SamplePath& path2,
                                 int component, double t);
/// Direct route for general f: Gamma_t((f o u) * M^{u^i,c}).
double integrate_levels_multidim_fn(const std::function<double(double, double)>& f,
                                    const SamplePath& path2, int component,
                                    double t);

}  // namespace symito
