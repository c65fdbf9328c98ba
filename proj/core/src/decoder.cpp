#include "emodec/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "emodec/error.hpp"

namespace emodec {

namespace {

std::size_t to_samples(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

double seconds(std::size_t samples, int sample_rate) { return static_cast<double>(samples) / sample_rate; }

}  // namespace

void WindowSpec::validate() const {
  if (!(window_length > 0.0) || !(hop_length > 0.0) || !std::isfinite(window_length) || !std::isfinite(hop_length)) {
    throw InvalidArgument("window and hop lengths must be positive");
  }
  if (hop_length > window_length) throw InvalidArgument("hop length must not exceed window length");
}

std::size_t WindowSpec::window_samples(int sample_rate) const { return to_samples(window_length, sample_rate); }
std::size_t WindowSpec::hop_samples(int sample_rate) const { return std::max<std::size_t>(1, to_samples(hop_length, sample_rate)); }

std::size_t WindowSpec::window_count(std::size_t n_samples, int sample_rate) const {
  const std::size_t w = window_samples(sample_rate);
  if (w == 0 || n_samples < w) return 0;
  return (n_samples - w) / hop_samples(sample_rate) + 1;
}

FeatureVector WindowAnalyzer::features(std::span<const double> window, int sample_rate, double t_start,
                                       double t_end) const {
  const auto mid = provider_.window_features(t_start, t_end);
  const auto dyn = analyze_window(window, sample_rate, dsp_);
  return FeatureVector::assemble(mid, dyn);
}

EmotionPoint WindowAnalyzer::analyze(std::span<const double> window, int sample_rate, double t_start,
                                     double t_end) const {
  EmotionPoint p = predict(model_, features(window, sample_rate, t_start, t_end));
  p.t = t_end;
  return p;
}

EmotionTrace dynamic_decode(const AudioBuffer& audio, const EmotionModel& model, const MidLevelProvider& provider,
                            const WindowSpec& spec, const DecodeOptions& options) {
  spec.validate();
  const int sr = audio.sample_rate;
  const std::size_t w = spec.window_samples(sr);
  const std::size_t h = spec.hop_samples(sr);
  const std::size_t count = spec.window_count(audio.size(), sr);
  const WindowAnalyzer analyzer(model, provider, options.dsp);

  EmotionTrace trace;
  trace.points.resize(count);
  auto run = [&](std::size_t first, std::size_t last) {
    for (std::size_t k = first; k < last; ++k) {
      const std::size_t start = k * h;
      trace.points[k] = analyzer.analyze(audio.view().subspan(start, w), sr, seconds(start, sr), seconds(start + w, sr));
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    run(0, count);
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t per = (count + threads - 1) / threads;
    for (std::size_t first = 0; first < count; first += per) {
      jobs.push_back(std::async(std::launch::async, run, first, std::min(count, first + per)));
    }
    for (auto& j : jobs) j.get();
  }
  return trace;
}

std::vector<std::size_t> static_window_starts(std::size_t n_samples, std::size_t window, std::size_t hop) {
  if (window == 0 || hop == 0) throw InvalidArgument("window and hop must be positive");
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window <= n_samples; s += hop) starts.push_back(s);
  return starts;
}

EmotionPoint static_decode(const AudioBuffer& audio, const EmotionModel& model, const MidLevelProvider& provider,
                           const WindowSpec& spec, const DspConfig& dsp) {
  if (audio.empty()) throw InvalidArgument("static decode needs non-empty audio");
  spec.validate();
  const int sr = audio.sample_rate;
  const std::size_t w = spec.window_samples(sr);
  const std::size_t h = spec.hop_samples(sr);
  const std::size_t n = audio.size();
  const WindowAnalyzer analyzer(model, provider, dsp);

  EmotionPoint out;
  if (n < w) {
    std::vector<double> tiled;
    tiled.reserve(w);
    while (tiled.size() < w) {
      const std::size_t take = std::min(n, w - tiled.size());
      tiled.insert(tiled.end(), audio.samples.begin(), audio.samples.begin() + static_cast<std::ptrdiff_t>(take));
    }
    out = analyzer.analyze(tiled, sr, 0.0, audio.duration_seconds());
  } else {
    const auto starts = static_window_starts(n, w, h);
    for (std::size_t s : starts) {
      const auto p = analyzer.analyze(audio.view().subspan(s, w), sr, seconds(s, sr), seconds(s + w, sr));
      out.valence += p.valence;
      out.arousal += p.arousal;
    }
    out.valence /= static_cast<double>(starts.size());
    out.arousal /= static_cast<double>(starts.size());
  }
  out.t = audio.duration_seconds();
  return out;
}

StreamingDecoder::StreamingDecoder(const EmotionModel& model, const MidLevelProvider& provider, WindowSpec spec,
                                   int sample_rate, DspConfig dsp)
    : analyzer_(model, provider, dsp),
      sample_rate_(sample_rate),
      window_((spec.validate(), spec.window_samples(sample_rate))),
      hop_(spec.hop_samples(sample_rate)),
      next_end_(window_) {
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  if (window_ == 0) throw InvalidArgument("window shorter than one sample");
}

std::vector<EmotionPoint> StreamingDecoder::push(std::span<const double> samples) {
  buffer_.insert(buffer_.end(), samples.begin(), samples.end());
  seen_ += samples.size();

  std::vector<EmotionPoint> out;
  while (seen_ >= next_end_) {
    const std::size_t start = next_end_ - window_;
    const auto began = std::chrono::steady_clock::now();
    const std::span<const double> window(buffer_.data() + (start - buffer_start_), window_);
    out.push_back(analyzer_.analyze(window, sample_rate_, seconds(start, sample_rate_), seconds(next_end_, sample_rate_)));
    latencies_ms_.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - began).count());
    next_end_ += hop_;
  }

  // Keep only what the next window still needs.
  const std::size_t keep_from = next_end_ - window_;
  if (keep_from > buffer_start_) {
    const std::size_t drop = std::min(keep_from - buffer_start_, buffer_.size());
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(drop));
    buffer_start_ += drop;
  }
  return out;
}

}  // namespace emodec
