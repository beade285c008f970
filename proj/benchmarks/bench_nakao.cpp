#include <benchmark/benchmark.h>

#include "symito/local_time.hpp"

using namespace symito;

namespace {

SamplePath bench_path(std::size_t n) {
  return simulate_path(ProcessSpec::brownian(1.0), 1.0, 1.0 / n, 7);
}

}  // namespace

/// Generic reversal-based Gamma: Theta(n * m) for m eval points.
static void GammaEval(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const SamplePath p = bench_path(n);
  const std::vector<std::size_t> eval = uniform_grid(p.steps(), m);
  const MafBuilder b =
      MafBuilder::level_indicator(FunctionDescriptor::identity(), 0.0);
  for (auto _ : state) {
    const AfPath g = gamma(b, p, eval);
    benchmark::DoNotOptimize(g.values.data());
  }
  state.SetComplexityN(static_cast<std::int64_t>(n * m));
}
BENCHMARK(GammaEval)
    ->Args({1024, 32})
    ->Args({4096, 64})
    ->Args({16384, 128})
    ->Args({65536, 256})
    ->Complexity();

/// Batched level field: one backward pass shared by every level.
static void GammaLevelsBatched(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto levels = static_cast<std::size_t>(state.range(1));
  const SamplePath p = bench_path(n);
  const LevelGrid grid =
      LevelGrid::spanning(p, FunctionDescriptor::identity(), levels);
  const std::vector<std::size_t> eval = sqrt_grid(p.steps());
  for (auto _ : state) {
    const LevelGammaField f = gamma_levels(
        p, FunctionDescriptor::identity(), grid.z, eval);
    benchmark::DoNotOptimize(f.data.data());
  }
}
BENCHMARK(GammaLevelsBatched)
    ->Args({16384, 64})
    ->Args({16384, 256})
    ->Args({16384, 1024});

static void LocalTimeFieldBuild(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  const SamplePath p = bench_path(n);
  const LevelGrid grid =
      LevelGrid::spanning(p, FunctionDescriptor::identity(), 256);
  const std::vector<std::size_t> eval = sqrt_grid(p.steps());
  for (auto _ : state) {
    const LocalTimeField f = local_time_field(
        p, FunctionDescriptor::identity(), grid.z, eval, spec);
    benchmark::DoNotOptimize(f.data.data());
  }
}
BENCHMARK(LocalTimeFieldBuild)->Arg(4096)->Arg(16384)->Arg(65536);
