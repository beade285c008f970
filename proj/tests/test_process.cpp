#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "symito/numeric.hpp"
#include "symito/process.hpp"

using namespace symito;

namespace {

/// Exact reconstruction: start value + continuous increments + ledger.
bool closure_holds(const SamplePath& p) {
  for (int c = 0; c < p.dim; ++c) {
    double v = p.value(0, c);
    for (std::size_t i = 0; i < p.steps(); ++i) {
      v = v + p.increment(i, c) + p.jump_at(i + 1, c);
      if (v != p.value(i + 1, c)) return false;
    }
  }
  return true;
}

std::vector<double> collect_jump_sizes(const ProcessSpec& spec,
                                       std::size_t want) {
  std::vector<double> sizes;
  std::uint64_t seed = 500;
  while (sizes.size() < want) {
    const SamplePath p = simulate_path(spec, 50.0, 1e-3, seed++);
    for (const JumpRecord& j : p.jumps) sizes.push_back(j.size[0]);
  }
  sizes.resize(want);
  return sizes;
}

/// Two-sample Kolmogorov-Smirnov distance between xs and -xs.
double sign_flip_ks(std::vector<double> xs) {
  std::vector<double> flipped(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) flipped[i] = -xs[i];
  std::sort(xs.begin(), xs.end());
  std::sort(flipped.begin(), flipped.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const double n = static_cast<double>(xs.size());
  while (i < xs.size() && j < flipped.size()) {
    if (xs[i] <= flipped[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / n));
  }
  return d;
}

}  // namespace

TEST_CASE("brownian path has the right shape and no jumps") {
  const SamplePath p = simulate_path(ProcessSpec::brownian(1.0), 1.0, 0.01, 7);
  CHECK(p.steps() == 100);
  CHECK(p.jumps.empty());
  CHECK(p.values.size() == 101);
  CHECK(closure_holds(p));
}

TEST_CASE("zero-intensity compound poisson stays at its start value") {
  const ProcessSpec spec =
      ProcessSpec::compound_poisson(0.0, {JumpDistKind::TwoPoint, 1.0, 0.0},
                                    0.0, 1.7);
  const SamplePath p = simulate_path(spec, 1.0, 0.01, 3);
  for (std::size_t i = 0; i <= p.steps(); ++i) CHECK(p.value(i) == 1.7);
  CHECK(p.jumps.empty());
}

TEST_CASE("terminal variance of brownian increments matches sigma2*T") {
  // CLT bound at 3 sigma for 1e4 samples: sample variance in [0.97, 1.03].
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const int n = 10000;
  std::vector<double> xt(n);
  for (int i = 0; i < n; ++i) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-4, 1000 + i);
    xt[i] = p.value(p.steps()) - p.value(0);
  }
  const SummaryStats s = summarize(xt);
  const double var = s.sd * s.sd;
  CHECK(var > 0.97);
  CHECK(var < 1.03);
}

TEST_CASE("replay with the same seed reproduces the path bit-exactly") {
  const ProcessSpec spec = ProcessSpec::brownian_plus_jumps(0.5, 1.2, 0.2, 0.05);
  const SamplePath a = simulate_path(spec, 1.0, 1e-3, 99);
  const SamplePath b = simulate_path(spec, 1.0, 1e-3, 99);
  CHECK(a.values == b.values);
  CHECK(a.cont_increments == b.cont_increments);
  REQUIRE(a.jumps.size() == b.jumps.size());
  for (std::size_t i = 0; i < a.jumps.size(); ++i) {
    CHECK(a.jumps[i].index == b.jumps[i].index);
    CHECK(a.jumps[i].size[0] == b.jumps[i].size[0]);
  }
  CHECK(closure_holds(a));
}

TEST_CASE("jump ledger left values match the pre-jump state") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.3, 0.05);
  const SamplePath p = simulate_path(spec, 2.0, 1e-3, 11);
  REQUIRE(!p.jumps.empty());
  for (const JumpRecord& j : p.jumps) {
    const auto g = static_cast<std::size_t>(j.index);
    CHECK(p.left_limit(g) == j.left[0]);
    CHECK(p.value(g) == j.left[0] + j.size[0]);
  }
}

TEST_CASE("poisson jump count matches the truncated intensity") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.2, 0.05);
  const LevyMeasure m = levy_measure(spec);
  const double expected = 2.0 * 0.2 * std::pow(0.05, -1.2) / 1.2;
  CHECK(m.intensity == doctest::Approx(expected).epsilon(1e-12));

  const int n_paths = 300;
  std::vector<double> counts(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-3, 40000 + i);
    counts[i] = static_cast<double>(p.jumps.size());
  }
  const SummaryStats s = summarize(counts);
  CHECK(std::abs(s.mean - m.intensity) < 3.0 * s.se + 0.05 * m.intensity);
}

TEST_CASE("empirical jump law is symmetric (sign-flip KS at the 1% level)") {
  // threshold 1.628 * sqrt(2/n) for two samples of equal size n
  const std::size_t n = 100000;
  const double threshold = 1.628 * std::sqrt(2.0 / static_cast<double>(n));

  SUBCASE("truncated alpha-stable") {
    const auto sizes =
        collect_jump_sizes(ProcessSpec::truncated_stable(1.2, 0.3, 0.05), n);
    CHECK(sign_flip_ks(sizes) < threshold);
  }
  SUBCASE("gaussian compound poisson") {
    const auto sizes = collect_jump_sizes(
        ProcessSpec::compound_poisson(40.0, {JumpDistKind::GaussianSymmetric,
                                             0.5, 0.0},
                                      0.01),
        n);
    CHECK(sign_flip_ks(sizes) < threshold);
  }
}

TEST_CASE("binning warning fires when intensity*dt exceeds the threshold") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 1.0, 0.05);
  const LevyMeasure m = levy_measure(spec);
  const SamplePath warn = simulate_path(spec, 1.0, 0.2 / m.intensity, 5);
  CHECK(warn.binning_warning);
  const SamplePath ok =
      simulate_path(spec, 1.0, 0.05 / m.intensity, 5);
  CHECK(!ok.binning_warning);
}

TEST_CASE("parameter domain errors are rejected") {
  CHECK_THROWS_AS(simulate_path(ProcessSpec::truncated_stable(2.5, 1.0, 0.05),
                                1.0, 0.01, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_path(ProcessSpec::truncated_stable(-0.1, 1.0, 0.05),
                                1.0, 0.01, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_path(ProcessSpec::brownian(1.0), 1.0, 2.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_path(ProcessSpec::brownian(1.0), 1.0, 0.9, 1),
                  std::invalid_argument);
  ProcessSpec bad = ProcessSpec::brownian(1.0);
  bad.sigma2 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("levy tail integral reproduces closed forms") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.0, 1.0, 0.1);
  SUBCASE("unit integrand over a finite annulus") {
    const double v =
        levy_tail_integral(spec, [](double) { return 1.0; }, 0.5, 1.0);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("odd integrand vanishes against the symmetric measure") {
    const double v =
        levy_tail_integral(spec, [](double y) { return y; }, 0.5, 1.0);
    CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("region above the support is empty") {
    const ProcessSpec cp = ProcessSpec::compound_poisson(
        2.0, {JumpDistKind::UniformSymmetric, 0.2, 1.0}, 0.0);
    const double v =
        levy_tail_integral(cp, [](double) { return 1.0; }, 2.0, 3.0);
    CHECK(v == 0.0);
  }
  SUBCASE("eps >= r is a domain error") {
    CHECK_THROWS_AS(
        levy_tail_integral(spec, [](double) { return 1.0; }, 1.0, 0.5),
        std::domain_error);
  }
  SUBCASE("non-integrable integrands are rejected") {
    CHECK_THROWS_AS(levy_tail_integral(
                        spec, [](double y) { return 1.0 / (y - 0.7); }, 0.5,
                        1.0),
                    std::domain_error);
  }
}

TEST_CASE("s_epsilon: identity map closed forms") {
  SUBCASE("below the truncation cutoff the region is empty") {
    const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 1.0, 0.05);
    CHECK(s_epsilon(spec, FunctionDescriptor::identity(), 0.05) == 0.0);
    CHECK(s_epsilon(spec, FunctionDescriptor::identity(), 0.01) == 0.0);
  }
  SUBCASE("alpha=1 closed form") {
    // 2 * int_{0.01}^{0.5} y^2 * y^{-2} dy = 2 * 0.49 = 0.98
    const ProcessSpec spec = ProcessSpec::truncated_stable(1.0, 1.0, 0.01);
    CHECK(s_epsilon(spec, FunctionDescriptor::identity(), 0.5) ==
          doctest::Approx(0.98).epsilon(1e-9));
  }
  SUBCASE("nonincreasing along a shrinking epsilon sequence") {
    const ProcessSpec spec = ProcessSpec::truncated_stable(1.5, 0.7, 0.001);
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 8; ++n) {
      const double s =
          s_epsilon(spec, FunctionDescriptor::identity(), std::pow(2.0, -n));
      CHECK(s <= prev + 1e-15);
      prev = s;
    }
  }
}

TEST_CASE("compensator integrand: parity and table interpolation") {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.3, 0.05);
  const auto id = FunctionDescriptor::identity();
  const auto tanh_f = FunctionDescriptor::tanh_fn();

  CHECK(compensator_integrand(spec, id, id, 0.3, 0.05, 1.0) == 0.0);
  CHECK(compensator_integrand(spec, id, FunctionDescriptor::constant(0.0), 0.3,
                              0.05, 1.0) == 0.0);
  CHECK(compensator_integrand(ProcessSpec::brownian(1.0), id, tanh_f, 0.3,
                              0.05, 1.0) == 0.0);

  const CompensatorTable table(spec, id, tanh_f, 0.05, 1.0, -3.0, 3.0, 2049);
  for (double x : {-2.4, -0.9, 0.0, 0.37, 1.8}) {
    const double direct = compensator_integrand(spec, id, tanh_f, x, 0.05, 1.0);
    CHECK(table(x) == doctest::Approx(direct).epsilon(1e-5));
  }
  // outside the build range the table falls back to direct quadrature
  const double far = compensator_integrand(spec, id, tanh_f, 5.0, 0.05, 1.0);
  CHECK(table(5.0) == doctest::Approx(far).epsilon(1e-12));
}

TEST_CASE("window rebases a sub-path and keeps closure exact") {
  const ProcessSpec spec = ProcessSpec::brownian_plus_jumps(1.0, 1.2, 0.2, 0.05);
  const SamplePath p = simulate_path(spec, 2.0, 1e-3, 17);
  const SamplePath w = p.window(500, 1000);
  CHECK(w.steps() == 1000);
  CHECK(w.value(0) == p.value(500));
  CHECK(closure_holds(w));
  for (const JumpRecord& j : w.jumps) {
    CHECK(j.index >= 1);
    CHECK(j.index <= 1000);
  }
}

TEST_CASE("diffusion2d increments carry the requested covariance") {
  const ProcessSpec spec = ProcessSpec::diffusion2d(1.0, 0.5, 2.0);
  const int n_paths = 400;
  KahanSum c11, c12, c22;
  std::size_t n_steps = 0;
  for (int i = 0; i < n_paths; ++i) {
    const SamplePath p = simulate_path(spec, 1.0, 1e-2, 700 + i);
    n_steps += p.steps();
    for (std::size_t k = 0; k < p.steps(); ++k) {
      c11.add(p.increment(k, 0) * p.increment(k, 0));
      c12.add(p.increment(k, 0) * p.increment(k, 1));
      c22.add(p.increment(k, 1) * p.increment(k, 1));
    }
  }
  const double scale = static_cast<double>(n_steps) * 1e-2;
  CHECK(c11.value() / scale == doctest::Approx(1.0).epsilon(0.03));
  CHECK(c12.value() / scale == doctest::Approx(0.5).epsilon(0.06));
  CHECK(c22.value() / scale == doctest::Approx(2.0).epsilon(0.03));
}
