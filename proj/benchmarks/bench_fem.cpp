#include <benchmark/benchmark.h>

#include "heatlab/fem.hpp"
#include "heatlab/mesh.hpp"

using namespace heatlab;

static void BM_Triangulate(benchmark::State& state) {
  const DomainSpec disk = DomainSpec::disk(1.0);
  const double h = 1.0 / state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(triangulate(disk, h));
}
BENCHMARK(BM_Triangulate)->Arg(10)->Arg(20)->Arg(40);

static void BM_Assemble(benchmark::State& state) {
  const MeshedDomain m = triangulate(DomainSpec::disk(1.0), 1.0 / state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(m));
}
BENCHMARK(BM_Assemble)->Arg(20)->Arg(40);

static void BM_TorsionSolve(benchmark::State& state) {
  const AssembledSystem sys = assemble(triangulate(DomainSpec::disk(1.0), 1.0 / state.range(0)));
  for (auto _ : state) {
    DirichletSolver solver(sys);
    benchmark::DoNotOptimize(solver.solve_poisson(Vector::Ones(sys.n_full())));
  }
}
BENCHMARK(BM_TorsionSolve)->Arg(20)->Arg(40);

BENCHMARK_MAIN();
