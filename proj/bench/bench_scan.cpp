#include <benchmark/benchmark.h>

#include "symorb/kernels.hpp"
#include "symorb/orbits.hpp"

using namespace symorb;

static void scan(benchmark::State& state, kernels::Exec exec) {
  const ProblemSpec p = ProblemSpec::pyramidal(2, 1.0);
  SearchOptions o;
  o.grid_points = static_cast<std::size_t>(state.range(0));
  o.exec = exec;
  for (auto _ : state) {
    SearchResult r = search_orbits(p, FamilySpec::B(0), o);
    benchmark::DoNotOptimize(r.scan.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

static void BM_ScanSerial(benchmark::State& s) { scan(s, kernels::Exec::serial); }
static void BM_ScanParallel(benchmark::State& s) { scan(s, kernels::Exec::parallel); }
BENCHMARK(BM_ScanSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_GridMax(benchmark::State& state) {
  const ProblemSpec p = ProblemSpec::spatial_double_polygon(10);
  const auto exec = state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
  for (auto _ : state) {
    auto g = kernels::grid_max([&](double phi) { return p.dW(phi); }, 0.0, 1.5707963267948966, 100000, exec);
    benchmark::DoNotOptimize(g.value);
  }
}
BENCHMARK(BM_GridMax)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
