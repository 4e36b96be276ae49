#include <benchmark/benchmark.h>

#include "heatlab/polynomial.hpp"

using namespace heatlab;

static void BM_MunznerQuadric(benchmark::State& state) {
  const HomogeneousPolynomial F = clifford_quadric(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(munzner_verify(F));
}
BENCHMARK(BM_MunznerQuadric)->Arg(1)->Arg(3);

static void BM_RadiusPower(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(HomogeneousPolynomial::radius_power(8, state.range(0)));
}
BENCHMARK(BM_RadiusPower)->Arg(2)->Arg(4);
