#include <benchmark/benchmark.h>

#include <complex>

#include "wickwave/noise.hpp"
#include "wickwave/oracles.hpp"
#include "wickwave/solvers.hpp"
#include "wickwave/spectral.hpp"

using namespace wickwave;

namespace {

SpectralField filled(int band, double phase) {
  SpectralField f(band);
  for (auto n : half_disk_modes(band)) {
    const double a = 1.0 / jbracket_sq(n);
    f.set_pair(n, std::polar(a, phase * (n.x + 2 * n.y)));
  }
  f.set_pair(FreqIndex{0, 0}, 1.0);
  return f;
}

void BM_ProductFft(benchmark::State& st) {
  const int band = static_cast<int>(st.range(0));
  const auto f = filled(band, 0.3), g = filled(band, 0.7);
  for (auto _ : st) benchmark::DoNotOptimize(multiply_dealiased(f, g));
}
BENCHMARK(BM_ProductFft)->RangeMultiplier(2)->Range(8, 128);

void BM_ProductDirect(benchmark::State& st) {
  const int band = static_cast<int>(st.range(0));
  const auto f = filled(band, 0.3), g = filled(band, 0.7);
  for (auto _ : st) benchmark::DoNotOptimize(multiply_direct(f, g));
}
BENCHMARK(BM_ProductDirect)->RangeMultiplier(2)->Range(4, 16);

void BM_LinPath(benchmark::State& st) {
  const NoiseSpec spec{0.3, static_cast<int>(st.range(0)), st.range(1) ? Flow::heat : Flow::wave, 1, 0};
  const auto grid = TimeGrid::covering(0.0, 0.25, 1.0 / 256);
  for (auto _ : st) benchmark::DoNotOptimize(sample_lin_path(spec, grid));
}
BENCHMARK(BM_LinPath)->ArgsProduct({{8, 16, 32}, {0, 1}});

void BM_WaveWickOracle(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(wave_wick_moment({1, 0}, 0.5, N, 0.3));
}
BENCHMARK(BM_WaveWickOracle)->RangeMultiplier(2)->Range(16, 128);

void BM_HeatDuhOracle(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(heat_duh_moment({1, 0}, 0.5, N, 0.75));
}
BENCHMARK(BM_HeatDuhOracle)->RangeMultiplier(2)->Range(16, 128);

void BM_WaveSolverStep(benchmark::State& st) {
  const int band = static_cast<int>(st.range(0));
  WaveState s{filled(band, 0.1), filled(band, 0.2), 0.0};
  for (auto _ : st) {
    const auto forcing = multiply_projected(s.v, s.v, band);
    s = wave_trig_euler_step(s, forcing, 1.0 / 512);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_WaveSolverStep)->RangeMultiplier(2)->Range(8, 64);

}  // namespace

BENCHMARK_MAIN();
