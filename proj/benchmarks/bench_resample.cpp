#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "szbench/resample.hpp"

namespace {

std::vector<double> tone(double fs, double seconds, double hz) {
  std::vector<double> x(static_cast<std::size_t>(fs * seconds));
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs);
  }
  return x;
}

void bm_resample(benchmark::State& state, double source_fs, double target_fs) {
  const auto x = tone(source_fs, static_cast<double>(state.range(0)), 10.0);
  const szbench::dsp::PolyphaseResampler resampler(source_fs, target_fs);

  for (auto _ : state) {
    benchmark::DoNotOptimize(resampler.process(x));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(x.size()));
}

void bm_downsample_512_256(benchmark::State& state) { bm_resample(state, 512.0, 256.0); }
void bm_upsample_200_256(benchmark::State& state) { bm_resample(state, 200.0, 256.0); }
void bm_fractional_250_256(benchmark::State& state) { bm_resample(state, 250.0, 256.0); }

BENCHMARK(bm_downsample_512_256)->Arg(60)->Arg(600);
BENCHMARK(bm_upsample_200_256)->Arg(60)->Arg(600);
BENCHMARK(bm_fractional_250_256)->Arg(60)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
