#include <benchmark/benchmark.h>

#include "symito/process.hpp"

using namespace symito;

static void SimulateBrownian(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::brownian(1.0);
  const auto n = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    SamplePath p = simulate_path(spec, 1.0, 1.0 / n, seed++);
    benchmark::DoNotOptimize(p.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SimulateBrownian)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

static void SimulateStablePlusBrownian(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::brownian_plus_jumps(1.0, 1.2, 0.2, 0.05);
  const auto n = static_cast<double>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    SamplePath p = simulate_path(spec, 1.0, 1.0 / n, seed++);
    benchmark::DoNotOptimize(p.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(SimulateStablePlusBrownian)
    ->RangeMultiplier(4)
    ->Range(256, 65536)
    ->Complexity();

static void CompensatorTableBuild(benchmark::State& state) {
  const ProcessSpec spec = ProcessSpec::truncated_stable(1.2, 0.2, 0.05);
  for (auto _ : state) {
    CompensatorTable table(spec, FunctionDescriptor::identity(),
                           FunctionDescriptor::tanh_fn(), 0.05, 1.0, -6.0, 6.0,
                           static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(&table);
  }
}
BENCHMARK(CompensatorTableBuild)->Arg(257)->Arg(1025)->Arg(4097);
