#include <benchmark/benchmark.h>

#include "eprqkd/experiment.hpp"

namespace {

using namespace eprqkd;

const Experiment& experiment() {
  static const Experiment e = make_experiment(ExperimentSpec{});
  return e;
}

// Same-basis cells are the correlated, expensive ones.
void BM_CoincidenceSameBasis(benchmark::State& state) {
  const auto& e = experiment();
  const Basis b = state.range(0) == 0 ? Basis::x : Basis::p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(coincidence_probability(e.source, e.stations, b, b, 0, 0));
  }
}
BENCHMARK(BM_CoincidenceSameBasis)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_CoincidenceMatrix(benchmark::State& state) {
  const auto& e = experiment();
  for (auto _ : state) benchmark::DoNotOptimize(coincidence_matrix(e.source, e.stations));
}
BENCHMARK(BM_CoincidenceMatrix)->Unit(benchmark::kMillisecond);

void BM_MakeExperiment(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_experiment(ExperimentSpec{}));
}
BENCHMARK(BM_MakeExperiment)->Unit(benchmark::kMillisecond);

}  // namespace
