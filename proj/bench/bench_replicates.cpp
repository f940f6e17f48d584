#include <benchmark/benchmark.h>

#include "dtlab/ensembles.hpp"

using namespace dtlab;
using namespace dtlab::ensembles;

namespace {

EnsembleSpec spec_for(int n) {
  EnsembleSpec s;
  s.mu = MeasureSpec::from_text("atomic:0@1/2,1@1/2");
  s.c = 1.0;
  s.n = n;
  s.seed = 42;
  return s;
}

void word_traces(benchmark::State& state, Schedule schedule) {
  const EnsembleSpec spec = spec_for(static_cast<int>(state.range(0)));
  const std::vector<int> word{0, 1, 0, 1};
  for (auto _ : state) {
    auto values = replicate_word_traces(spec, word, 16, schedule);
    benchmark::DoNotOptimize(values.data());
  }
  state.counters["threads"] = resolve_threads(schedule);
}

void BM_WordTracesSerial(benchmark::State& state) { word_traces(state, Schedule::Serial); }
void BM_WordTracesParallel(benchmark::State& state) { word_traces(state, Schedule::Parallel); }

void norms(benchmark::State& state, Schedule schedule) {
  const EnsembleSpec spec = spec_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(norm_estimate(spec, 4, schedule).mean);
}

void BM_NormSerial(benchmark::State& state) { norms(state, Schedule::Serial); }
void BM_NormParallel(benchmark::State& state) { norms(state, Schedule::Parallel); }

}  // namespace

BENCHMARK(BM_WordTracesSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WordTracesParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormParallel)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
