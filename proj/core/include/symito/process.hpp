#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symito/functions.hpp"

namespace symito {

enum class ProcessKind {
  BrownianMotion,
  TruncatedAlphaStable,
  CompoundPoissonSymmetric,
  BrownianPlusJumps,
  Diffusion2D,
};

enum class JumpDistKind { TwoPoint, UniformSymmetric, GaussianSymmetric };

/// Symmetric jump-size law for the compound-Poisson model; the simulated law
/// is always additionally restricted to |y| > delta.
struct JumpDist {
  JumpDistKind kind = JumpDistKind::TwoPoint;
  double a = 1.0;  // two_point: +-a; uniform: inner radius; gauss: sd
  double b = 0.0;  // uniform: outer radius
};

/// A symmetric Markov process model. Drift-free by construction; jump models
/// carry the truncated Levy measure nu(dy) = scale*|y|^(-1-alpha) dy on
/// {|y| > delta} (or rate * jump law for the compound-Poisson kind). The
/// simulated process IS this truncated model: identities downstream are
/// checked against it, never against an untruncated ideal.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::BrownianMotion;
  double sigma2 = 1.0;  // variance per unit time of the continuous part
  double alpha = 0.0;   // stability index, jump kinds only, in (0,2)
  double scale = 0.0;   // Levy density scale c
  double delta = 0.0;   // small-jump truncation cutoff
  double rate = 0.0;    // compound-Poisson intensity
  JumpDist jump_dist;
  double a11 = 1.0, a12 = 0.0, a22 = 1.0;  // 2x2 SPD matrix, Diffusion2D only
  double x0 = 0.0, y0 = 0.0;               // start state

  int dim() const { return kind == ProcessKind::Diffusion2D ? 2 : 1; }
  bool has_jumps() const {
    return kind == ProcessKind::TruncatedAlphaStable ||
           kind == ProcessKind::CompoundPoissonSymmetric ||
           kind == ProcessKind::BrownianPlusJumps;
  }
  bool has_continuous() const { return sigma2 > 0.0 || kind == ProcessKind::Diffusion2D; }

  /// Throws std::invalid_argument when a parameter is outside its domain.
  void validate() const;

  static ProcessSpec brownian(double sigma2 = 1.0, double x0 = 0.0);
  static ProcessSpec truncated_stable(double alpha, double scale, double delta,
                                      double x0 = 0.0);
  static ProcessSpec compound_poisson(double rate, JumpDist dist, double delta,
                                      double x0 = 0.0);
  static ProcessSpec brownian_plus_jumps(double sigma2, double alpha,
                                         double scale, double delta,
                                         double x0 = 0.0);
  static ProcessSpec diffusion2d(double a11, double a12, double a22,
                                 double x0 = 0.0, double y0 = 0.0);
};

/// Quadrature view of the truncated Levy measure: a one-sided density on
/// (delta, upper) mirrored by symmetry, plus point masses. intensity is the
/// total mass of both sides.
struct LevyMeasure {
  double delta = 0.0;
  double upper = 0.0;  // density support bound, may be +inf
  std::function<double(double)> density;  // one-sided, defined on (delta, upper)
  double tail_alpha = 0.0;  // set when upper is +inf: density = tail_scale*y^(-1-tail_alpha)
  double tail_scale = 0.0;
  struct Atom {
    double y;     // positive representative; the mirror atom -y is implied
    double mass;  // mass of +y alone (mirror carries the same mass)
  };
  std::vector<Atom> atoms;
  double intensity = 0.0;

  bool empty() const { return intensity <= 0.0; }
};

LevyMeasure levy_measure(const ProcessSpec& spec);

struct JumpRecord {
  std::int64_t index;          // grid point carrying the jump, in [1, n]
  std::array<double, 2> left;  // state just before the jump
  std::array<double, 2> size;
};

/// A discretized trajectory with the continuous and jump channels kept
/// separate. Closure invariant, exact in floating point by construction:
///   values[i+1] = values[i] + cont_increments[i] + (jump at i+1, if any).
struct SamplePath {
  int dim = 1;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;           // (steps+1) * dim
  std::vector<double> cont_increments;  // steps * dim
  std::vector<JumpRecord> jumps;        // at most one per grid point, sorted
  bool binning_warning = false;         // intensity*dt above the binning threshold

  std::size_t steps() const { return dim ? cont_increments.size() / dim : 0; }
  double horizon() const { return dt * static_cast<double>(steps()); }
  double value(std::size_t i, int c = 0) const { return values[i * dim + c]; }
  double increment(std::size_t i, int c = 0) const {
    return cont_increments[i * dim + c];
  }
  double time_at(std::size_t i) const { return dt * static_cast<double>(i); }
  /// Left limit at grid point i (pre-jump state when a jump sits at i).
  double left_limit(std::size_t i, int c = 0) const;
  /// Jump size at grid point i, 0 when none.
  double jump_at(std::size_t i, int c = 0) const;
  const JumpRecord* jump_record_at(std::size_t i) const;

  /// Sub-path on grid points [from, from + n_steps], rebased to time 0.
  SamplePath window(std::size_t from, std::size_t n_steps) const;
};

/// Simulates the model on a uniform grid of round(horizon/dt) steps.
/// Continuous increments are centered Gaussians; jump times come from a
/// Poisson process of the truncated intensity and are binned to grid points
/// (collisions pushed to the next free point, at most one jump per point).
SamplePath simulate_path(const ProcessSpec& spec, double horizon, double dt,
                         std::uint64_t seed);

/// Integral of g against the truncated Levy measure over {eps < |y| < r}.
double levy_tail_integral(const ProcessSpec& spec,
                          const std::function<double(double)>& g, double eps,
                          double r, double rel_tol = 1e-10);

struct StateWindow {
  double lo = -3.0;
  double hi = 3.0;
  int samples = 65;
};

/// Per-state jump compensator integrand
///   c(x) = integral over {lo_cut < |u(x+z) - u(x)| < hi_cut} of
///          (F(u(x+z)) - F(u(x))) nu(dz),
/// hi_cut = +inf means no upper cut. Positive and negative jump directions
/// are paired before integrating, so the full-range case converges as a
/// symmetric principal value (the only meaning it has for a symmetric
/// measure).
double compensator_integrand(const ProcessSpec& spec,
                             const FunctionDescriptor& u,
                             const FunctionDescriptor& F, double x,
                             double lo_cut, double hi_cut,
                             double rel_tol = 1e-10);

/// Read-only interpolation table of compensator_integrand over a state
/// range. Built once per (spec, u, F, cuts) and shared across paths and
/// threads; states outside the table fall back to direct quadrature.
class CompensatorTable {
 public:
  CompensatorTable() = default;
  CompensatorTable(const ProcessSpec& spec, const FunctionDescriptor& u,
                   const FunctionDescriptor& F, double lo_cut, double hi_cut,
                   double x_lo, double x_hi, std::size_t nodes = 2049);

  double operator()(double x) const;
  bool identically_zero() const { return zero_; }
  double lo_cut() const { return lo_cut_; }
  double hi_cut() const { return hi_cut_; }

 private:
  ProcessSpec spec_;
  FunctionDescriptor u_, f_;
  double lo_cut_ = 0.0, hi_cut_ = 0.0;
  double x_lo_ = 0.0, dx_ = 1.0;
  std::vector<double> table_;
  bool zero_ = true;
};

/// S_eps = sup over the state window of
///   integral over {|u(x+y)-u(x)| < eps} of |u(x+y)-u(x)|^2 nu(dy).
/// For the identity map the window is irrelevant and the region is exact.
double s_epsilon(const ProcessSpec& spec, const FunctionDescriptor& u,
                 double eps, const StateWindow& window = {});

}  // namespace symito
