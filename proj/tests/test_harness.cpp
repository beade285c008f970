#include <doctest.h>

#include <cmath>
#include <vector>

#include "symito/harness.hpp"
#include "symito/numeric.hpp"

using namespace symito;

namespace {

ExperimentConfig base_config(ProcessSpec spec) {
  ExperimentConfig cfg;
  cfg.spec = spec;
  cfg.n_paths = 200;
  cfg.dts = {1e-2, 1e-3};
  cfg.seed_base = 424242;
  return cfg;
}

}  // namespace

TEST_CASE("ito decomposition of the identity is exact path by path") {
  const ProcessSpec spec = ProcessSpec::brownian_plus_jumps(1.0, 1.2, 0.3, 0.05);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::identity(), 8);
  const std::vector<double> ts = {0.25, 0.5, 1.0};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-3, seed);
    const PathReport rep = ito_assemble(p, ctx, ts);
    REQUIRE(rep.checkpoints.size() == 3);
    for (const TermBreakdown& b : rep.checkpoints) {
      CHECK(std::abs(b.residual) < 1e-12);
      // residual is computed from the stored terms, never independently
      CHECK(b.residual == b.lhs - b.martingale - b.zero_energy -
                              b.bounded_variation);
    }
  }
}

TEST_CASE("constant-zero outer function kills every term") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.3, 0.05);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::constant(0.0),
      6);
  const SamplePath p = simulate_path(spec, 1.0, 1e-3, 2);
  const std::vector<double> ts = {1.0};
  const PathReport rep = ito_assemble(p, ctx, ts);
  CHECK(rep.checkpoints[0].lhs == 0.0);
  CHECK(rep.checkpoints[0].martingale == 0.0);
  CHECK(rep.checkpoints[0].zero_energy == 0.0);
  CHECK(rep.checkpoints[0].bounded_variation == 0.0);
}

TEST_CASE("outer functions must vanish at zero") {
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::constant(2.0),
      6);
  const SamplePath p = simulate_path(spec, 1.0, 1e-2, 2);
  const std::vector<double> ts = {1.0};
  CHECK_THROWS_AS(ito_assemble(p, ctx, ts), std::invalid_argument);
}

TEST_CASE("square outer function recovers the classical bracket term") {
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::square(), 6);
  const std::vector<double> ts = {1.0};
  const int n_paths = 400;
  std::vector<double> q(n_paths), r(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-3, 71000 + i);
    const PathReport rep = ito_assemble(p, ctx, ts);
    q[i] = rep.checkpoints[0].zero_energy;
    r[i] = rep.checkpoints[0].residual;
  }
  CHECK(std::abs(summarize(q).mean - 1.0) < 0.05);
  CHECK(summarize(r).max_abs < 0.2);
}

TEST_CASE("tanaka residual cancels exactly on piecewise-constant paths") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.4, 0.05);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::identity(), 8);
  const std::vector<double> ts = {0.5, 1.0};
  for (std::uint64_t seed = 11; seed <= 20; ++seed) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-3, seed);
    for (double a : {-0.4, 0.0, 0.8})
      for (double res : tanaka_residuals(p, ctx, a, ts))
        CHECK(std::abs(res) < 1e-12);
  }
}

TEST_CASE("tanaka residual is exactly zero below the path range") {
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::identity(), 6);
  const SamplePath p = simulate_path(spec, 1.0, 1e-3, 9);
  double lo = p.value(0);
  for (std::size_t i = 0; i <= p.steps(); ++i) lo = std::min(lo, p.value(i));
  const std::vector<double> ts = {1.0};
  for (double res : tanaka_residuals(p, ctx, lo - 0.5, ts))
    CHECK(res == 0.0);
}

TEST_CASE("tanaka residuals shrink with the step size") {
  ExperimentConfig cfg = base_config(ProcessSpec::brownian(1.0));
  cfg.u = FunctionDescriptor::identity();
  cfg.level = 0.0;
  const IdentityRun run = run_tanaka(cfg);
  CHECK(run.trend_monotone);
  REQUIRE(run.rows.size() == cfg.dts.size() * cfg.checkpoint_fracs.size());
  CHECK(run.residual_samples.size() == static_cast<std::size_t>(cfg.n_paths));
}

TEST_CASE("tanaka holds across the mixed jump-diffusion model") {
  // jumps enter through the threshold-filtered sum; the residual must still
  // shrink with dt and stay moderate at 1e-3
  ExperimentConfig cfg =
      base_config(ProcessSpec::brownian_plus_jumps(1.0, 1.2, 0.3, 0.05));
  cfg.level = 0.0;
  cfg.n_paths = 300;
  const IdentityRun run = run_tanaka(cfg);
  CHECK(run.trend_monotone);
  CHECK(run.rows.back().mean_residual < 0.08);
}

TEST_CASE("martingale mean test: degenerate, honest, biased") {
  std::vector<double> zeros(32, 0.0);
  const ZTestResult z0 = martingale_mean_test(zeros);
  CHECK(z0.pass);
  CHECK(z0.degenerate);

  std::vector<double> biased(100);
  for (std::size_t i = 0; i < biased.size(); ++i)
    biased[i] = 0.5 + 0.01 * std::sin(static_cast<double>(i));
  const ZTestResult zb = martingale_mean_test(biased);
  CHECK(!zb.pass);

  std::vector<double> small(10, 0.0);
  CHECK_THROWS_AS(martingale_mean_test(small), std::invalid_argument);

  // honest martingale samples from the mid-size jump part
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.3, 0.05);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::tanh_fn(), 8);
  const std::vector<double> ts = {1.0};
  std::vector<double> md(300);
  for (int i = 0; i < 300; ++i) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-3, 72000 + i);
    md[static_cast<std::size_t>(i)] =
        ito_assemble(p, ctx, ts).checkpoints[0].martingale;
  }
  CHECK(martingale_mean_test(md).pass);
}

TEST_CASE("convergence table needs at least two step sizes") {
  ExperimentConfig cfg = base_config(ProcessSpec::brownian(1.0));
  cfg.dts = {1e-2};
  CHECK_THROWS_AS(convergence_table(cfg, IdentityKind::Tanaka),
                  std::invalid_argument);
}

TEST_CASE("convergence table rows vanish for an exact identity") {
  ExperimentConfig cfg = base_config(ProcessSpec::truncated_stable(1.2, 0.3, 0.05));
  cfg.F = FunctionDescriptor::identity();
  cfg.n_paths = 50;
  const ConvergenceTable table = convergence_table(cfg, IdentityKind::Ito);
  CHECK(table.monotone_trend);
  for (const IdentityRunRow& row : table.rows) {
    CHECK(row.mean_residual < 1e-12);
    CHECK(row.pass);
  }
}

TEST_CASE("bidimensional checks") {
  const ProcessSpec spec = ProcessSpec::diffusion2d(1.0, 0.0, 1.0);

  SUBCASE("additive outer function reduces to two exact 1-d identities") {
    const std::vector<double> ts = {0.5, 1.0};
    for (std::uint64_t seed = 31; seed <= 40; ++seed) {
      const SamplePath p = simulate_path(spec, 1.0, 1e-3, seed);
      const PathReport rep = multidim_ito_check(p, Function2::sum(), ts);
      for (const TermBreakdown& b : rep.checkpoints)
        CHECK(std::abs(b.residual) < 1e-12);
    }
  }

  SUBCASE("constant outer function gives all-zero terms") {
    const SamplePath p = simulate_path(spec, 1.0, 1e-2, 3);
    const std::vector<double> ts = {1.0};
    const PathReport rep =
        multidim_ito_check(p, Function2::constant(4.0), ts);
    CHECK(rep.checkpoints[0].lhs == 0.0);
    CHECK(rep.checkpoints[0].martingale == 0.0);
    CHECK(rep.checkpoints[0].zero_energy == 0.0);
  }

  SUBCASE("correlated coordinates feed the cross-variation through Q") {
    // For F(x,y) = xy the discrete level calculus is exact, so the residual
    // vanishes even with a12 != 0 and Q absorbs the cross bracket a12*t.
    const ProcessSpec corr = ProcessSpec::diffusion2d(1.0, 0.5, 2.0);
    const std::vector<double> ts = {1.0};
    std::vector<double> q(100);
    for (int i = 0; i < 100; ++i) {
      const SamplePath p = simulate_path(corr, 1.0, 1e-3, 74000 + i);
      const PathReport rep = multidim_ito_check(p, Function2::product(), ts);
      CHECK(std::abs(rep.checkpoints[0].residual) < 1e-12);
      q[static_cast<std::size_t>(i)] = rep.checkpoints[0].zero_energy;
    }
    const SummaryStats s = summarize(q);
    CHECK(std::abs(s.mean - 0.5) <= 3.0 * s.se + 0.01);
  }

  SUBCASE("product outer function: zero-energy term is centered") {
    const std::vector<double> ts = {1.0};
    const int n_paths = 300;
    std::vector<double> q(n_paths);
    for (int i = 0; i < n_paths; ++i) {
      const SamplePath p = simulate_path(spec, 1.0, 1e-3, 73000 + i);
      q[static_cast<std::size_t>(i)] =
          multidim_ito_check(p, Function2::product(), ts)
              .checkpoints[0]
              .zero_energy;
    }
    const SummaryStats s = summarize(q);
    CHECK(std::abs(s.mean) <= 3.0 * s.se);
  }

  SUBCASE("1-d specs are rejected") {
    ExperimentConfig cfg = base_config(ProcessSpec::brownian(1.0));
    CHECK_THROWS_AS(run_multidim(cfg), std::invalid_argument);
  }

  SUBCASE("residuals shrink with the step size") {
    ExperimentConfig cfg = base_config(spec);
    cfg.F2 = Function2::product();
    cfg.n_paths = 150;
    const IdentityRun run = run_multidim(cfg);
    CHECK(run.trend_monotone);
  }
}

TEST_CASE("pathwise identities do not care about the start protocol") {
  // Compare Tanaka residuals at the path-relative level a = X_0; the
  // statistic is translation covariant, so the start law must not move it.
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const HarnessContext ctx = HarnessContext::make(
      spec, FunctionDescriptor::identity(), FunctionDescriptor::identity(), 6);
  const std::vector<double> ts = {1.0};
  const int n_paths = 300;
  const double dt = 1e-3, burn = 5.0;

  std::vector<double> fixed_abs(n_paths), window_abs(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const SamplePath pf = simulate_path(spec, 1.0, dt, 80000 + i);
    fixed_abs[i] =
        std::abs(tanaka_residuals(pf, ctx, pf.value(0), ts)[0]);
    SamplePath pw = simulate_path(spec, burn + 1.0, dt, 81000 + i);
    const std::size_t b = grid_index(pw, burn);
    pw = pw.window(b, pw.steps() - b);
    window_abs[i] =
        std::abs(tanaka_residuals(pw, ctx, pw.value(0), ts)[0]);
  }
  const SummaryStats sf = summarize(fixed_abs);
  const SummaryStats sw = summarize(window_abs);
  CHECK(std::abs(sf.mean - sw.mean) <= 2.0 * (sf.se + sw.se));
}

TEST_CASE("experiment validation rejects malformed configurations") {
  ExperimentConfig cfg = base_config(ProcessSpec::brownian(1.0));
  cfg.dts = {1e-3, 1e-2};  // increasing
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config(ProcessSpec::brownian(1.0));
  cfg.n_paths = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = base_config(ProcessSpec::brownian(1.0));
  cfg.checkpoint_fracs = {0.5, 1.5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
