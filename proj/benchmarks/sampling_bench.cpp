#include <benchmark/benchmark.h>

#include "eprqkd/source_model.hpp"

namespace {

using namespace eprqkd;

const SourceModel& source() {
  static const SourceModel s = build_source({0.055, 2.0, 0.72, 40.0}, {});
  return s;
}

void BM_SamplePair(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_pair(source(), rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplePair);

void BM_SampleQuadratures(benchmark::State& state) {
  RandomStream rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_quadratures(source(), Basis::x, Basis::x, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleQuadratures);

}  // namespace
