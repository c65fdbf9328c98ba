#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "emodec/audio_io.hpp"
#include "emodec/decoder.hpp"
#include "emodec/dsp.hpp"
#include "emodec/midlevel.hpp"
#include "emodec/regression.hpp"

using namespace emodec;

namespace {

// Noisy tone bursts, deterministic.
std::vector<double> test_audio(double seconds, int sr = kCanonicalSampleRate) {
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 0.02);
  std::vector<double> x(static_cast<std::size_t>(seconds * sr));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / sr;
    const double env = std::exp(-8.0 * std::fmod(t, 0.25));
    x[i] = 0.3 * env * std::sin(2.0 * std::numbers::pi * 440.0 * t) + g(rng);
  }
  return x;
}

void BM_Stft(benchmark::State& state) {
  const auto x = test_audio(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(stft(x, kCanonicalSampleRate, 2048, 220));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_Stft)->Unit(benchmark::kMillisecond);

void BM_SuperFlux(benchmark::State& state) {
  const auto spec = stft(test_audio(5.0), kCanonicalSampleRate, 2048, 220);
  for (auto _ : state) benchmark::DoNotOptimize(superflux_odf(spec));
}
BENCHMARK(BM_SuperFlux)->Unit(benchmark::kMillisecond);

void BM_AnalyzeWindow(benchmark::State& state) {
  const auto x = test_audio(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_window(x, kCanonicalSampleRate));
}
BENCHMARK(BM_AnalyzeWindow)->Unit(benchmark::kMillisecond);

void BM_FitOls(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(n, 9);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 9; ++j) X(i, j) = g(rng);
    y(i) = X.row(i).sum() + g(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, y));
}
BENCHMARK(BM_FitOls)->Arg(288)->Arg(5000);

void BM_Resample(benchmark::State& state) {
  AudioBuffer in;
  in.sample_rate = 44100;
  in.samples = test_audio(2.0, 44100);
  for (auto _ : state) benchmark::DoNotOptimize(resample(in, kCanonicalSampleRate));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
