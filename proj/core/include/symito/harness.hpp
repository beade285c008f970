#pragma once

#include <functional>
#include <optional>
#include <string>

#include "symito/jump_functionals.hpp"
#include "symito/local_time.hpp"

namespace symito {

/// One experiment: a process, an inner map u, an outer function, a horizon,
/// a list of step sizes and the Monte Carlo budget. Pass/fail thresholds
/// live here, not in the formulas.
struct ExperimentConfig {
  ProcessSpec spec;
  FunctionDescriptor u = FunctionDescriptor::identity();
  FunctionDescriptor F = FunctionDescriptor::square();
  Function2 F2 = Function2::product();

  double horizon = 1.0;
  std::vector<double> dts = {1e-2, 1e-3, 1e-4};
  int n_paths = 1000;
  std::uint64_t seed_base = 20260801;
  int level_cells = 256;
  std::vector<double> checkpoint_fracs = {0.25, 0.5, 1.0};
  StartProtocol start = StartProtocol::FixedPoint;
  double burn_in_factor = 10.0;  // burn-in = factor * horizon
  int threads = 0;               // 0 = hardware concurrency
  int truncation_levels = 8;

  double level = 0.0;      // level a for tanaka / local-time / support
  double bandwidth = 0.02; // kernel oracle bandwidth
  double occ_lo = -1.0, occ_hi = 1.0;  // occupation probe support

  double tol_residual = 0.05;
  double tol_relative = 0.05;
  double tol_localtime = 0.10;
  double tol_exact = 1e-12;
  double tol_z = 3.0;

  void validate() const;
  std::vector<double> checkpoint_times() const;
};

/// Per-checkpoint values of the decomposition
///   F(u(X_t)) - F(u(X_0)) = M + Q + V + residual.
struct TermBreakdown {
  double t = 0.0;
  double lhs = 0.0;
  double martingale = 0.0;         // M^d + int F'(u) dM^{u,c}
  double zero_energy = 0.0;        // int F'(z) d_z Gamma^z + A
  double bounded_variation = 0.0;  // big jumps
  double residual = 0.0;           // computed, never stored independently
};

struct PathReport {
  std::uint64_t seed = 0;
  std::vector<TermBreakdown> checkpoints;
};

/// Immutable per-experiment machinery shared across paths and threads:
/// the truncation sequence and the frozen-state compensator table.
struct HarnessContext {
  ProcessSpec spec;
  FunctionDescriptor u, F;
  bool has_jumps = false;
  double eps_floor = 0.0;
  TruncationSequence seq;
  std::optional<CompensatorTable> mid_table;  // cuts (eps_floor, 1)

  static HarnessContext make(const ProcessSpec& spec,
                             const FunctionDescriptor& u,
                             const FunctionDescriptor& F,
                             int truncation_levels);
};

PathReport ito_assemble(const SamplePath& path, const HarnessContext& ctx,
                        std::span<const double> checkpoint_times);

/// Tanaka residual per checkpoint,
///   Gamma^a_t - [(u(X_0)-a)^- - (u(X_t)-a)^- - int 1{u<=a} dM^{u,c}
///               + sum of (u-a)^- jump increments above the threshold floor].
std::vector<double> tanaka_residuals(const SamplePath& path,
                                     const HarnessContext& ctx, double a,
                                     std::span<const double> checkpoint_times);

PathReport multidim_ito_check(const SamplePath& path2, const Function2& F2,
                              std::span<const double> checkpoint_times);

struct ZTestResult {
  double z = 0.0;
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  bool pass = false;
  bool degenerate = false;
};

/// z = mean / SE with pass iff |z| <= 3; all-zero samples pass exactly.
ZTestResult martingale_mean_test(std::span<const double> samples);

struct IdentityRunRow {
  std::string identity;
  double dt = 0.0;
  double t = 0.0;
  int n_paths = 0;
  double mean_residual = 0.0;
  double se_residual = 0.0;
  double max_abs_residual = 0.0;
  bool pass = false;
};

struct IdentityRun {
  std::vector<IdentityRunRow> rows;  // per (dt, checkpoint)
  /// Per-path samples at the finest dt and final checkpoint.
  std::vector<double> residual_samples;
  /// Companion samples (kernel-oracle values, martingale samples, ...).
  std::vector<double> aux_samples;
  bool trend_monotone = true;  // mean |R(T)| nonincreasing along the dt list
};

IdentityRun run_ito(const ExperimentConfig& cfg);
IdentityRun run_tanaka(const ExperimentConfig& cfg);
IdentityRun run_occupation(const ExperimentConfig& cfg);
IdentityRun run_localtime(const ExperimentConfig& cfg);
IdentityRun run_multidim(const ExperimentConfig& cfg);

enum class IdentityKind { Ito, Tanaka, Occupation, LocalTime, MultidimIto };

IdentityRun run_identity(const ExperimentConfig& cfg, IdentityKind kind);

struct ConvergenceTable {
  std::vector<IdentityRunRow> rows;
  bool monotone_trend = true;
};

/// Residual refinement table across the dt list; needs >= 2 dt values.
ConvergenceTable convergence_table(const ExperimentConfig& cfg,
                                   IdentityKind kind);

std::string identity_name(IdentityKind kind);

}  // namespace symito
