#include <benchmark/benchmark.h>

#include "eprqkd/analysis.hpp"
#include "eprqkd/experiment.hpp"
#include "eprqkd/session.hpp"

namespace {

using namespace eprqkd;

const Experiment& experiment() {
  static const Experiment e = make_experiment(ExperimentSpec{});
  return e;
}

void BM_Session(benchmark::State& state) {
  const auto& e = experiment();
  SessionConfig cfg;
  cfg.coincidences = static_cast<std::uint64_t>(state.range(0));
  cfg.estimation_pairs = cfg.coincidences / 10;
  std::uint64_t emitted = 0;
  for (auto _ : state) {
    const auto r = run_session(e.source, e.stations, cfg);
    emitted += r.emitted_pairs;
    ++cfg.seed;
  }
  state.counters["pairs/s"] =
      benchmark::Counter(static_cast<double>(emitted), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Session)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ScanPoint(benchmark::State& state) {
  const auto& e = experiment();
  const std::vector<double> position{1.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan_simulation(e.source, e.stations, {Side::A, Basis::x, 0},
                                             Basis::x, position, state.range(0), ++seed));
  }
}
BENCHMARK(BM_ScanPoint)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMicrosecond);

}  // namespace
