#include <benchmark/benchmark.h>

#include <random>

#include "szbench/scoring.hpp"

namespace {

using szbench::EventList;

// A day-long recording with `n` events of 30-120 s spread uniformly.
EventList random_events(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> onset(0.0, 86000.0);
  std::uniform_real_distribution<double> duration(30.0, 120.0);

  EventList list;
  list.recording_duration_s = 86400.0;
  for (std::size_t i = 0; i < n; ++i) list.events.push_back({onset(rng), duration(rng)});
  szbench::sort_by_onset(list);
  return list;
}

void bm_event_scoring(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ref = random_events(n, 1);
  const auto hyp = random_events(n, 2);
  const szbench::scoring::ScoringParams params;

  for (auto _ : state) {
    benchmark::DoNotOptimize(szbench::scoring::score_event_based(ref, hyp, params));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(bm_event_scoring)->Arg(64)->Arg(512)->Arg(4096);

void bm_sample_scoring(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ref = random_events(n, 1);
  const auto hyp = random_events(n, 2);
  const szbench::scoring::ScoringParams params;

  for (auto _ : state) {
    benchmark::DoNotOptimize(szbench::scoring::score_sample_based(ref, hyp, params));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(bm_sample_scoring)->Arg(64)->Arg(512);

void bm_regularize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto list = random_events(n, 3);
  const szbench::scoring::ScoringParams params;

  for (auto _ : state) {
    benchmark::DoNotOptimize(szbench::scoring::regularize(list, params));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(bm_regularize)->Arg(64)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
