#include "emodec/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include <fftw3.h>

#include "emodec/error.hpp"
#include "emodec/io_util.hpp"

namespace emodec {

namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwArray = std::unique_ptr<T[], FftwFree>;

// Plans are created once per size under a lock (the FFTW planner is not
// thread-safe); executing a plan on fresh fftw_malloc'd arrays is.
fftw_plan r2c_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mutex);
  if (auto it = plans.find(n); it != plans.end()) return it->second;
  FftwArray<double> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  FftwArray<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  plans.emplace(n, plan);
  return plan;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t seconds_to_frames(double seconds, double frame_rate) {
  return static_cast<std::size_t>(std::lround(seconds * frame_rate));
}

}  // namespace

void PeakPickParams::validate() const {
  for (double v : {pre_max, post_max, pre_avg, post_avg, relative_delta, delta, min_ioi}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("peak-picking parameters must be finite and >= 0");
  }
}

RmsTrace rms_trace(std::span<const double> samples, int sample_rate, const FrameSpec& spec) {
  spec.validate();
  RmsTrace trace;
  trace.frame_spec = spec;
  trace.sample_rate = sample_rate;
  const std::size_t n = spec.frame_count(samples.size());
  trace.values.resize(n);
  trace.frame_times.resize(n);
  const double half = static_cast<double>(spec.frame_length) / 2.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto frame = samples.subspan(k * spec.hop_length, spec.frame_length);
    double sum_sq = 0.0;
    for (double x : frame) sum_sq += x * x;
    trace.values[k] = std::sqrt(sum_sq / static_cast<double>(spec.frame_length));
    trace.frame_times[k] = (static_cast<double>(k * spec.hop_length) + half) / sample_rate;
  }
  return trace;
}

double mean_rms(const RmsTrace& trace, double t_start, double t_end) {
  if (!(t_start < t_end)) throw InvalidArgument("mean_rms requires t_start < t_end");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const double t = trace.frame_times[k];
    if (t >= t_start && t < t_end) {
      sum += trace.values[k];
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

Spectrogram stft(std::span<const double> samples, int sample_rate, std::size_t fft_size, std::size_t hop,
                 Window window) {
  if (!is_power_of_two(fft_size)) throw InvalidArgument("fft_size must be a power of two");
  if (hop == 0 || hop > fft_size) throw InvalidArgument("hop must be in [1, fft_size]");

  const FrameSpec framing{fft_size, hop};
  Spectrogram spec;
  spec.fft_size = fft_size;
  spec.hop = hop;
  spec.n_bins = fft_size / 2 + 1;
  spec.n_frames = framing.frame_count(samples.size());
  spec.frame_rate = static_cast<double>(sample_rate) / static_cast<double>(hop);
  spec.bin_frequencies.resize(spec.n_bins);
  for (std::size_t b = 0; b < spec.n_bins; ++b) {
    spec.bin_frequencies[b] = static_cast<double>(b) * sample_rate / static_cast<double>(fft_size);
  }
  spec.magnitudes.resize(spec.n_frames * spec.n_bins);
  if (spec.n_frames == 0) return spec;

  const auto taper = make_window(window, fft_size);
  const fftw_plan plan = r2c_plan(fft_size);
  FftwArray<double> in(static_cast<double*>(fftw_malloc(sizeof(double) * fft_size)));
  FftwArray<fftw_complex> out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spec.n_bins)));

  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const double* src = samples.data() + t * hop;
    for (std::size_t i = 0; i < fft_size; ++i) in[i] = src[i] * taper[i];
    fftw_execute_dft_r2c(plan, in.get(), out.get());
    double* row = spec.magnitudes.data() + t * spec.n_bins;
    for (std::size_t b = 0; b < spec.n_bins; ++b) row[b] = std::hypot(out[b][0], out[b][1]);
  }
  return spec;
}

OnsetDetectionFunction superflux_odf(const Spectrogram& spec, std::size_t lag, std::size_t max_width) {
  if (lag < 1) throw InvalidArgument("superflux lag must be >= 1");
  if (max_width < 1 || max_width % 2 == 0) throw InvalidArgument("superflux max_width must be odd and >= 1");

  OnsetDetectionFunction odf;
  odf.frame_rate = spec.frame_rate;
  odf.values.assign(spec.n_frames, 0.0);
  if (spec.n_frames <= lag) return odf;

  const std::size_t bins = spec.n_bins;
  const std::size_t radius = max_width / 2;
  std::vector<double> log_mag(spec.magnitudes.size());
  std::transform(spec.magnitudes.begin(), spec.magnitudes.end(), log_mag.begin(),
                 [](double m) { return std::log1p(m); });

  // Frequency-direction running maximum of each frame.
  std::vector<double> filtered(log_mag.size());
  for (std::size_t t = 0; t < spec.n_frames; ++t) {
    const double* row = log_mag.data() + t * bins;
    double* dst = filtered.data() + t * bins;
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t lo = b >= radius ? b - radius : 0;
      const std::size_t hi = std::min(bins - 1, b + radius);
      dst[b] = *std::max_element(row + lo, row + hi + 1);
    }
  }

  for (std::size_t t = lag; t < spec.n_frames; ++t) {
    const double* cur = log_mag.data() + t * bins;
    const double* ref = filtered.data() + (t - lag) * bins;
    double flux = 0.0;
    for (std::size_t b = 0; b < bins; ++b) flux += std::max(0.0, cur[b] - ref[b]);
    odf.values[t] = flux;
  }
  return odf;
}

OnsetList pick_onsets(const OnsetDetectionFunction& odf, const PeakPickParams& params) {
  params.validate();
  OnsetList onsets;
  const auto& v = odf.values;
  const std::size_t n = v.size();
  if (n == 0 || !(odf.frame_rate > 0.0)) return onsets;

  const double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return onsets;
  const double threshold = std::max(params.relative_delta * peak, params.delta);

  const std::size_t pre_max = seconds_to_frames(params.pre_max, odf.frame_rate);
  const std::size_t post_max = seconds_to_frames(params.post_max, odf.frame_rate);
  const std::size_t pre_avg = seconds_to_frames(params.pre_avg, odf.frame_rate);
  const std::size_t post_avg = seconds_to_frames(params.post_avg, odf.frame_rate);

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];

  bool have_last = false;
  double last_time = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (!(v[t] > 0.0)) continue;
    const std::size_t max_lo = t >= pre_max ? t - pre_max : 0;
    const std::size_t max_hi = std::min(n - 1, t + post_max);
    if (*std::max_element(v.begin() + static_cast<std::ptrdiff_t>(max_lo),
                          v.begin() + static_cast<std::ptrdiff_t>(max_hi) + 1) > v[t]) {
      continue;
    }
    const std::size_t avg_lo = t >= pre_avg ? t - pre_avg : 0;
    const std::size_t avg_hi = std::min(n - 1, t + post_avg);
    const double mean = (prefix[avg_hi + 1] - prefix[avg_lo]) / static_cast<double>(avg_hi - avg_lo + 1);
    if (v[t] < mean + threshold) continue;
    const double time = static_cast<double>(t) / odf.frame_rate;
    if (have_last && time - last_time < params.min_ioi) continue;
    onsets.onset_times.push_back(time);
    last_time = time;
    have_last = true;
  }
  return onsets;
}

double onset_density(const OnsetList& onsets, double t_start, double t_end) {
  if (!(t_start < t_end)) throw InvalidArgument("onset_density requires t_start < t_end");
  const auto lo = std::lower_bound(onsets.onset_times.begin(), onsets.onset_times.end(), t_start);
  const auto hi = std::lower_bound(onsets.onset_times.begin(), onsets.onset_times.end(), t_end);
  return static_cast<double>(hi - lo) / (t_end - t_start);
}

OnsetList detect_onsets(std::span<const double> samples, int sample_rate, const OnsetConfig& config) {
  const auto spec = stft(samples, sample_rate, config.fft_size, config.hop, config.window);
  return pick_onsets(superflux_odf(spec, config.superflux), config.peaks);
}

WindowDynamics analyze_window(std::span<const double> samples, int sample_rate, const DspConfig& config) {
  WindowDynamics out;
  if (samples.empty()) return out;
  const double duration = static_cast<double>(samples.size()) / sample_rate;
  out.onset_density = static_cast<double>(detect_onsets(samples, sample_rate, config.onsets).size()) / duration;
  const auto trace = rms_trace(samples, sample_rate, config.rms);
  if (!trace.values.empty()) {
    out.mean_rms = std::accumulate(trace.values.begin(), trace.values.end(), 0.0) /
                   static_cast<double>(trace.values.size());
  }
  return out;
}

std::string rms_csv(const RmsTrace& trace) {
  std::string out = "time_s,rms\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    out += format_double(trace.frame_times[k]) + ',' + format_double(trace.values[k]) + '\n';
  }
  return out;
}

std::string onsets_csv(const OnsetList& onsets) {
  std::string out = "time_s\n";
  for (double t : onsets.onset_times) out += format_double(t) + '\n';
  return out;
}

}  // namespace emodec
