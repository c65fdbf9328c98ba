#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "emodec/emotion.hpp"
#include "emodec/stream_message.hpp"

namespace emodec {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  ///< 0 picks an ephemeral port
  /// Frames a client may have queued before it is disconnected.
  std::size_t client_buffer = 64;
  /// When set, other GET paths are served from this directory ("/" -> index.html).
  std::filesystem::path static_dir;
};

struct ServerStats {
  std::string state;
  std::size_t clients = 0;
  std::size_t points = 0;
  std::size_t dropped_clients = 0;
  bool ended = false;
};

/// HTTP + WebSocket broadcast endpoint.
///   GET /stream  (upgrade)  every published frame, in order; late joiners first get
///                           the most recent point (and `end` if the session is over)
///   GET /status             JSON session state
/// A client whose queue exceeds `client_buffer` frames, or whose write fails, is
/// disconnected; publishing never blocks on clients.
class StreamServer {
 public:
  explicit StreamServer(ServerOptions options = {});
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  /// Binds and starts serving on a background thread. Throws IoError when the
  /// address/port cannot be bound.
  void start();
  void stop();

  /// Bound port (useful with port 0).
  std::uint16_t port() const;

  /// Thread-safe. Point frames must have strictly increasing t within the session.
  void publish(const StreamMessage& message);
  void publish_point(const EmotionPoint& p) { publish(StreamMessage::make_point(p)); }
  /// Updates the state reported by /status. Status frames are only sent when
  /// published explicitly.
  void set_state(const std::string& state);
  /// Broadcasts `end`; clients are closed after it is delivered.
  void finish();

  std::size_t client_count() const;
  bool wait_for_clients(std::size_t n, std::chrono::milliseconds timeout) const;
  /// Waits until every client has written its queue (or timeout). True when drained.
  bool drain(std::chrono::milliseconds timeout) const;
  ServerStats stats() const;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

/// Publishes the trace's points at wall-clock times t / speed after the call, then
/// `end`. Returns early (still sending `end`) when `stop` becomes true.
void replay_trace(const EmotionTrace& trace, StreamServer& server, double speed = 1.0,
                  const std::atomic<bool>* stop = nullptr);

}  // namespace emodec
