#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "emodec/audio_io.hpp"
#include "emodec/dsp.hpp"
#include "emodec/emotion.hpp"
#include "emodec/midlevel.hpp"
#include "emodec/regression.hpp"

namespace emodec {

/// Sliding analysis window in seconds; 0 < hop_length <= window_length.
struct WindowSpec {
  double window_length = 5.0;
  double hop_length = 1.0;

  static constexpr WindowSpec dynamic_default() { return {5.0, 1.0}; }
  static constexpr WindowSpec static_default() { return {15.0, 5.0}; }

  void validate() const;
  std::size_t window_samples(int sample_rate) const;
  std::size_t hop_samples(int sample_rate) const;
  /// floor((n - W) / H) + 1 for n >= W, else 0 (in samples).
  std::size_t window_count(std::size_t n_samples, int sample_rate) const;
};

/// Turns one window of audio into a prediction. References must outlive the analyzer.
class WindowAnalyzer {
 public:
  WindowAnalyzer(const EmotionModel& model, const MidLevelProvider& provider, DspConfig dsp = {})
      : model_(model), provider_(provider), dsp_(dsp) {}

  FeatureVector features(std::span<const double> window, int sample_rate, double t_start, double t_end) const;
  /// The returned point is stamped with t_end.
  EmotionPoint analyze(std::span<const double> window, int sample_rate, double t_start, double t_end) const;

  const DspConfig& dsp() const noexcept { return dsp_; }

 private:
  const EmotionModel& model_;
  const MidLevelProvider& provider_;
  DspConfig dsp_;
};

struct DecodeOptions {
  DspConfig dsp;
  /// Windows are independent; >1 evaluates them on worker threads with identical results.
  unsigned threads = 1;
};

/// Windows [t - w, t) for t = w, w + hop, ... <= duration, one point per window at t.
/// Audio shorter than one window gives an empty trace.
EmotionTrace dynamic_decode(const AudioBuffer& audio, const EmotionModel& model, const MidLevelProvider& provider,
                            const WindowSpec& spec = WindowSpec::dynamic_default(), const DecodeOptions& options = {});

/// Window starts 0, hop, 2*hop, ... with start + window <= n (all in samples).
std::vector<std::size_t> static_window_starts(std::size_t n_samples, std::size_t window, std::size_t hop);

/// One summary prediction: clips shorter than the window are looped to fill it,
/// longer clips average the predictions of every full window. The point is stamped
/// with the clip duration.
EmotionPoint static_decode(const AudioBuffer& audio, const EmotionModel& model, const MidLevelProvider& provider,
                           const WindowSpec& spec = WindowSpec::static_default(), const DspConfig& dsp = {});

/// Incremental form of dynamic_decode: feed consecutive chunks, receive each point
/// as soon as its window is complete. Timestamps come from the sample clock.
class StreamingDecoder {
 public:
  StreamingDecoder(const EmotionModel& model, const MidLevelProvider& provider, WindowSpec spec, int sample_rate,
                   DspConfig dsp = {});

  std::vector<EmotionPoint> push(std::span<const double> samples);

  std::size_t samples_seen() const noexcept { return seen_; }
  /// Wall time spent analysing each completed window, in milliseconds.
  const std::vector<double>& window_latencies_ms() const noexcept { return latencies_ms_; }

 private:
  WindowAnalyzer analyzer_;
  int sample_rate_;
  std::size_t window_;
  std::size_t hop_;
  std::vector<double> buffer_;      // samples from buffer_start_ onwards
  std::size_t buffer_start_ = 0;
  std::size_t seen_ = 0;
  std::size_t next_end_;
  std::vector<double> latencies_ms_;
};

}  // namespace emodec
