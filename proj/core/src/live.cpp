#include "emodec/live.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace emodec {

double LiveStats::median_latency_ms() const {
  if (window_latency_ms.empty()) return 0.0;
  auto v = window_latency_ms;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double LiveStats::max_latency_ms() const {
  return window_latency_ms.empty() ? 0.0 : *std::max_element(window_latency_ms.begin(), window_latency_ms.end());
}

LiveDecodeSession::LiveDecodeSession(PacedSource source, const EmotionModel& model, const MidLevelProvider& provider,
                                     WindowSpec spec, DspConfig dsp)
    : source_(std::move(source)), model_(model), provider_(provider), spec_(spec), dsp_(dsp) {
  spec_.validate();
}

void LiveDecodeSession::add_sink(PointSink sink) { sinks_.push_back(std::move(sink)); }

LiveStats LiveDecodeSession::run() {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<AudioChunk> queue;
  bool exhausted = false;

  std::jthread ingest([&] {
    while (!stop_.load()) {
      auto chunk = source_.next();
      std::lock_guard lock(mutex);
      if (!chunk) break;
      queue.push_back(std::move(*chunk));
      ready.notify_one();
    }
    std::lock_guard lock(mutex);
    exhausted = true;
    ready.notify_one();
  });

  StreamingDecoder decoder(model_, provider_, spec_, source_.sample_rate(), dsp_);
  LiveStats stats;
  while (true) {
    AudioChunk chunk;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return !queue.empty() || exhausted || stop_.load(); });
      if (stop_.load() || queue.empty()) break;
      chunk = std::move(queue.front());
      queue.pop_front();
    }
    ++stats.chunks;
    for (const auto& point : decoder.push(chunk.samples)) {
      ++stats.points;
      for (auto& sink : sinks_) sink(point);
    }
  }
  stop_.store(true);
  stats.window_latency_ms = decoder.window_latencies_ms();
  return stats;
}

}  // namespace emodec
