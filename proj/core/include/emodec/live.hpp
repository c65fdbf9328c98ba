#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <vector>

#include "emodec/audio_io.hpp"
#include "emodec/decoder.hpp"

namespace emodec {

struct LiveStats {
  std::size_t chunks = 0;
  std::size_t points = 0;
  std::vector<double> window_latency_ms;

  double median_latency_ms() const;
  double max_latency_ms() const;
};

/// Two-stage pipeline: an ingestion thread pulls chunks from a PacedSource into a
/// queue, and the calling thread runs the StreamingDecoder and hands every point
/// to the registered sinks in order.
class LiveDecodeSession {
 public:
  using PointSink = std::function<void(const EmotionPoint&)>;

  LiveDecodeSession(PacedSource source, const EmotionModel& model, const MidLevelProvider& provider,
                    WindowSpec spec = WindowSpec::dynamic_default(), DspConfig dsp = {});

  /// Must be called before run().
  void add_sink(PointSink sink);

  /// Blocks until the source is exhausted or stop() is called.
  LiveStats run();

  /// Thread-safe; run() returns after the chunk currently being processed.
  void stop() noexcept { stop_.store(true); }

 private:
  PacedSource source_;
  const EmotionModel& model_;
  const MidLevelProvider& provider_;
  WindowSpec spec_;
  DspConfig dsp_;
  std::vector<PointSink> sinks_;
  std::atomic<bool> stop_{false};
};

}  // namespace emodec
