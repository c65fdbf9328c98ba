#include "emodec/stream_server.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "emodec/error.hpp"

namespace emodec {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

using Frame = std::shared_ptr<const std::string>;

std::string_view mime_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

class WsSession;

}  // namespace

struct StreamServer::Impl {
  // Declared first so it is destroyed last: pending handlers own sessions.
  net::io_context ioc{1};
  ServerOptions options;
  std::optional<tcp::acceptor> acceptor;
  std::thread thread;
  std::uint16_t bound_port = 0;
  bool running = false;

  mutable std::mutex mutex;
  mutable std::condition_variable changed;
  std::vector<std::shared_ptr<WsSession>> sessions;
  Frame latest_point;
  Frame end_frame;
  bool have_last_t = false;
  double last_t = 0.0;
  std::string state = "idle";
  std::size_t points = 0;
  std::size_t dropped = 0;
  std::weak_ptr<Impl> weak_self;

  void attach(const std::shared_ptr<WsSession>& session);
  void detach(const WsSession* session, bool dropped_client);
  std::string status_json() const;
  void do_accept();
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, std::weak_ptr<StreamServer::Impl> hub, std::size_t limit)
      : ws_(std::move(socket)), hub_(std::move(hub)), limit_(limit) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  // Called with the hub mutex held, from any thread.
  void enqueue(const Frame& frame, bool is_end) {
    if (overflowed_.load() || closed_.load()) return;
    if (pending_.fetch_add(1) + 1 > limit_) {
      overflowed_.store(true);
      net::post(ws_.get_executor(), [self = shared_from_this()] { self->fail(true); });
      return;
    }
    net::post(ws_.get_executor(), [self = shared_from_this(), frame, is_end] { self->on_enqueue(frame, is_end); });
  }

  std::size_t pending() const noexcept { return closed_.load() ? 0 : pending_.load(); }

  void shutdown() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_.load()) return;
      self->closed_.store(true);
      beast::error_code ignored;
      beast::get_lowest_layer(self->ws_).socket().close(ignored);
    });
  }

 private:
  struct Outgoing {
    Frame frame;
    bool is_end;
  };

  void on_accept(beast::error_code ec) {
    if (ec) return;
    auto hub = hub_.lock();
    if (!hub) return;
    hub->attach(shared_from_this());
    do_read();
  }

  void do_read() {
    ws_.async_read(inbox_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->fail(false);
        return;
      }
      self->inbox_.consume(self->inbox_.size());  // client frames are ignored
      self->do_read();
    });
  }

  void on_enqueue(const Frame& frame, bool is_end) {
    if (closed_.load()) return;
    queue_.push_back({frame, is_end});
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front().frame),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
  }

  void on_write(beast::error_code ec) {
    if (detached_) return;  // queue was cleared while the write was in flight
    if (ec) {
      fail(true);
      return;
    }
    pending_.fetch_sub(1);
    const bool was_end = queue_.front().is_end;
    queue_.pop_front();
    if (was_end) {
      ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](beast::error_code) {
        self->fail(false);
      });
      return;
    }
    if (!queue_.empty()) do_write();
  }

  void fail(bool dropped) {
    if (detached_) return;
    detached_ = true;
    closed_.store(true);
    queue_.clear();
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
    if (auto hub = hub_.lock()) hub->detach(this, dropped);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer inbox_;
  std::weak_ptr<StreamServer::Impl> hub_;
  std::size_t limit_;
  std::deque<Outgoing> queue_;
  std::atomic<std::size_t> pending_{0};
  std::atomic<bool> overflowed_{false};
  std::atomic<bool> closed_{false};
  bool detached_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::weak_ptr<StreamServer::Impl> hub)
      : stream_(std::move(socket)), hub_(std::move(hub)) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

 private:
  void on_read(beast::error_code ec) {
    if (ec) return;
    auto hub = hub_.lock();
    if (!hub) return;
    const std::string target(req_.target());
    const std::string path = target.substr(0, target.find('?'));

    if (websocket::is_upgrade(req_)) {
      if (path == "/stream") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), hub_, hub->options.client_buffer)->run(std::move(req_));
        return;
      }
      respond(http::status::not_found, "text/plain", "no such socket endpoint\n");
      return;
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "method not allowed\n");
      return;
    }
    if (path == "/status") {
      respond(http::status::ok, "application/json", hub->status_json());
      return;
    }
    if (!hub->options.static_dir.empty() && path.find("..") == std::string::npos) {
      std::filesystem::path file = hub->options.static_dir / (path == "/" ? std::string("index.html") : path.substr(1));
      std::ifstream in(file, std::ios::binary);
      if (in && std::filesystem::is_regular_file(file)) {
        std::ostringstream body;
        body << in.rdbuf();
        respond(http::status::ok, mime_type(file), body.str());
        return;
      }
    }
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, std::string_view type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "emodecode");
    res->set(http::field::content_type, std::string(type));
    res->set(http::field::access_control_allow_origin, "*");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::weak_ptr<StreamServer::Impl> hub_;
};

}  // namespace

void StreamServer::Impl::attach(const std::shared_ptr<WsSession>& session) {
  std::lock_guard lock(mutex);
  if (latest_point) session->enqueue(latest_point, false);
  if (end_frame) session->enqueue(end_frame, true);
  sessions.push_back(session);
  changed.notify_all();
}

void StreamServer::Impl::detach(const WsSession* session, bool dropped_client) {
  std::lock_guard lock(mutex);
  const auto it = std::find_if(sessions.begin(), sessions.end(), [&](const auto& s) { return s.get() == session; });
  if (it == sessions.end()) return;
  sessions.erase(it);
  if (dropped_client) ++dropped;
  changed.notify_all();
}

std::string StreamServer::Impl::status_json() const {
  std::lock_guard lock(mutex);
  nlohmann::ordered_json j;
  j["state"] = state;
  j["clients"] = sessions.size();
  j["points"] = points;
  j["dropped_clients"] = dropped;
  j["ended"] = static_cast<bool>(end_frame);
  j["last_t"] = have_last_t ? nlohmann::ordered_json(last_t) : nlohmann::ordered_json(nullptr);
  j["schema"] = kWireSchemaVersion;
  return j.dump() + "\n";
}

void StreamServer::Impl::do_accept() {
  acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted || !acceptor->is_open()) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), weak_self)->run();
    do_accept();
  });
}

StreamServer::StreamServer(ServerOptions options) : impl_(std::make_shared<Impl>()) {
  impl_->options = std::move(options);
  if (impl_->options.client_buffer == 0) throw InvalidArgument("client buffer must hold at least one frame");
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  if (impl_->running) return;
  auto& impl = *impl_;
  impl.weak_self = impl_;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl.options.address, ec);
  if (ec) throw InvalidArgument("invalid listen address '" + impl.options.address + "'");
  const tcp::endpoint endpoint(address, impl.options.port);
  impl.acceptor.emplace(impl.ioc);
  impl.acceptor->open(endpoint.protocol(), ec);
  if (!ec) impl.acceptor->set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) impl.acceptor->bind(endpoint, ec);
  if (!ec) impl.acceptor->listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    impl.acceptor.reset();
    throw IoError("cannot listen on " + impl.options.address + ":" + std::to_string(impl.options.port) + " (" +
                  ec.message() + ")");
  }
  impl.bound_port = impl.acceptor->local_endpoint().port();
  impl.do_accept();
  impl.running = true;
  impl.thread = std::thread([&impl] { impl.ioc.run(); });
}

void StreamServer::stop() {
  if (!impl_ || !impl_->running) return;
  auto& impl = *impl_;
  net::post(impl.ioc, [&impl] {
    beast::error_code ignored;
    if (impl.acceptor) impl.acceptor->close(ignored);
  });
  {
    std::lock_guard lock(impl.mutex);
    for (auto& s : impl.sessions) s->shutdown();
  }
  // Give close handlers a moment, then stop the loop.
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  impl.ioc.stop();
  if (impl.thread.joinable()) impl.thread.join();
  {
    std::lock_guard lock(impl.mutex);
    impl.sessions.clear();
  }
  impl.running = false;
}

std::uint16_t StreamServer::port() const { return impl_->bound_port; }

void StreamServer::publish(const StreamMessage& message) {
  auto& impl = *impl_;
  auto frame = std::make_shared<const std::string>(message.to_json());
  std::lock_guard lock(impl.mutex);
  if (impl.end_frame) throw InvalidArgument("session already ended");
  switch (message.kind) {
    case StreamMessage::Kind::Point:
      if (impl.have_last_t && !(message.point.t > impl.last_t)) {
        throw InvalidArgument("point timestamps must be strictly increasing");
      }
      impl.have_last_t = true;
      impl.last_t = message.point.t;
      impl.latest_point = frame;
      ++impl.points;
      break;
    case StreamMessage::Kind::Status:
      impl.state = message.state;
      break;
    case StreamMessage::Kind::End:
      impl.end_frame = frame;
      impl.state = "ended";
      break;
  }
  const bool is_end = message.kind == StreamMessage::Kind::End;
  for (auto& s : impl.sessions) s->enqueue(frame, is_end);
}

void StreamServer::set_state(const std::string& state) {
  std::lock_guard lock(impl_->mutex);
  if (!impl_->end_frame) impl_->state = state;
}

void StreamServer::finish() {
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->end_frame) return;
  }
  publish(StreamMessage::make_end());
}

std::size_t StreamServer::client_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sessions.size();
}

bool StreamServer::wait_for_clients(std::size_t n, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(impl_->mutex);
  return impl_->changed.wait_for(lock, timeout, [&] { return impl_->sessions.size() >= n; });
}

bool StreamServer::drain(std::chrono::milliseconds timeout) const {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    std::size_t pending = 0;
    {
      std::lock_guard lock(impl_->mutex);
      for (const auto& s : impl_->sessions) pending += s->pending();
    }
    if (pending == 0) return true;
    if (std::chrono::steady_clock::now() >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

ServerStats StreamServer::stats() const {
  std::lock_guard lock(impl_->mutex);
  ServerStats s;
  s.state = impl_->state;
  s.clients = impl_->sessions.size();
  s.points = impl_->points;
  s.dropped_clients = impl_->dropped;
  s.ended = static_cast<bool>(impl_->end_frame);
  return s;
}

void replay_trace(const EmotionTrace& trace, StreamServer& server, double speed, const std::atomic<bool>* stop) {
  if (!(speed > 0.0)) throw InvalidArgument("replay speed must be positive");
  server.set_state("replaying");
  const auto start = std::chrono::steady_clock::now();
  for (const auto& p : trace.points) {
    const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(p.t / speed));
    while (std::chrono::steady_clock::now() < due) {
      if (stop && stop->load()) {
        server.finish();
        return;
      }
      std::this_thread::sleep_until(std::min(due, std::chrono::steady_clock::now() + std::chrono::milliseconds(20)));
    }
    if (stop && stop->load()) break;
    server.publish_point(p);
  }
  server.finish();
}

}  // namespace emodec
