#include <benchmark/benchmark.h>

#include "smallnoise/flow.hpp"
#include "smallnoise/rng.hpp"
#include "smallnoise/sde.hpp"
#include "smallnoise/wlaw.hpp"

using namespace smallnoise;

static void BM_Phi(benchmark::State& state) {
  const auto model = builtin_model("balancing_selection", 1.0);
  double x = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(phi(model, 5.0, x));
}
BENCHMARK(BM_Phi);

static void BM_FlowTableBuild(benchmark::State& state) {
  const auto model = builtin_model("balancing_selection", 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(FlowTable(model));
}
BENCHMARK(BM_FlowTableBuild);

static void BM_H(benchmark::State& state) {
  const FlowTable table(builtin_model("balancing_selection", 1.0));
  double w = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.H(w));
    w = w < 5.0 ? w * 1.01 : 0.1;
  }
}
BENCHMARK(BM_H);

static void BM_SampleW(benchmark::State& state) {
  const auto law = LimitLaw::from_slopes(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_W(law, state.range(0), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleW)->Arg(1 << 14);

static void BM_EulerStep(benchmark::State& state) {
  const auto model = builtin_model("wright_fisher", 1.0);
  CounterRng rng = path_stream(1, 0);
  const double h = 1e-4, sqrt_h = 1e-2;
  TruncatedEuler e(model, 1e-3, 0.3);
  for (auto _ : state) {
    e.step(h, sqrt_h, rng.normal());
    if (e.absorbed()) e = TruncatedEuler(model, 1e-3, 0.3);
  }
}
BENCHMARK(BM_EulerStep);
BENCHMARK_MAIN();
