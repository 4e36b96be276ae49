#include <benchmark/benchmark.h>

#include "heatlab/heat.hpp"
#include "heatlab/mesh.hpp"

using namespace heatlab;

static void BM_HeatTimeline(benchmark::State& state) {
  const AssembledSystem sys = assemble(triangulate(DomainSpec::disk(1.0), 0.06));
  HeatOptions opt;
  opt.record_fields = false;
  for (auto _ : state) {
    const TimeGrid grid = TimeGrid::geometric(1e-5 * sys.scale2, 0.5, state.range(0));
    benchmark::DoNotOptimize(solve_heat(sys, grid, opt));
  }
}
BENCHMARK(BM_HeatTimeline)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ConvolutionB(benchmark::State& state) {
  const AssembledSystem sys = assemble(triangulate(DomainSpec::disk(1.0), 0.06));
  const HeatTimeline tl = solve_heat(sys, TimeGrid::geometric(1e-5 * sys.scale2, 0.5, 100));
  for (auto _ : state) benchmark::DoNotOptimize(convolution_B(tl, 0.3, state.range(0)));
}
BENCHMARK(BM_ConvolutionB)->Arg(48)->Arg(96);
