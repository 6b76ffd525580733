#pragma once

#include <deque>
#include <regex>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "centaur/harness/session.hpp"

namespace centaur::harness {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

using HttpRequest = http::request<http::string_body>;
using HttpResponse = http::response<http::string_body>;

/// Routes one request. Schemas:
///   POST /sessions                 {human, blind, team_color, fen?, opening_id?, seed?} -> 201 state
///   GET  /sessions/{id}            -> 200 state
///   POST /sessions/{id}/choice     {label: "A"|"B", decision?} -> 200 state; 409 out of turn
///   GET  /sessions/{id}/result     -> 200 {game, decisions, unblinding, blind, pgn}; 409 until finished
///   GET  /health                   -> 200 {ok: true}
/// Errors are {error: message} with 400, 404, 405 or 409.
inline HttpResponse handle_request(SessionManager& mgr, const HttpRequest& req) {
  auto reply = [&](http::status st, const nlohmann::json& body) {
    HttpResponse res{st, req.version()};
    res.set(http::field::content_type, "application/json");
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = body.dump();
    res.prepare_payload();
    return res;
  };
  auto error = [&](int code, const std::string& msg) {
    return reply(static_cast<http::status>(code), {{"error", msg}});
  };
  auto body = [&]() -> nlohmann::json {
    if (req.body().empty()) return nlohmann::json::object();
    try {
      return nlohmann::json::parse(req.body());
    } catch (const nlohmann::json::exception& e) {
      throw SessionError(400, std::string("body is not JSON: ") + e.what());
    }
  };

  if (req.method() == http::verb::options) {
    HttpResponse res{http::status::no_content, req.version()};
    res.set(http::field::access_control_allow_origin, "*");
    res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    res.set(http::field::access_control_allow_headers, "Content-Type");
    res.keep_alive(req.keep_alive());
    res.prepare_payload();
    return res;
  }

  static const std::regex session_re("^/sessions/([A-Za-z0-9_-]+)(/choice|/result)?/?$");
  std::string target(req.target());
  if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
  std::smatch m;
  try {
    if (target == "/health") return reply(http::status::ok, {{"ok", true}});
    if (target == "/sessions" || target == "/sessions/") {
      if (req.method() != http::verb::post) return error(405, "use POST /sessions");
      auto s = mgr.create(SessionRequest::from_json(body()));
      s->start();
      return reply(http::status::created, s->snapshot());
    }
    if (std::regex_match(target, m, session_re)) {
      auto s = mgr.get(m[1]);
      const std::string tail = m[2];
      if (tail.empty()) {
        if (req.method() != http::verb::get) return error(405, "use GET");
        return reply(http::status::ok, s->snapshot());
      }
      if (tail == "/result") {
        if (req.method() != http::verb::get) return error(405, "use GET");
        return reply(http::status::ok, s->result());
      }
      if (req.method() != http::verb::post) return error(405, "use POST");
      const auto b = body();
      if (!b.is_object() || !b.contains("label") || !b["label"].is_string())
        return error(400, "expected {\"label\": \"A\" | \"B\"}");
      std::optional<std::size_t> decision;
      if (b.contains("decision") && b["decision"].is_number_unsigned()) decision = b["decision"].get<std::size_t>();
      return reply(http::status::ok, s->choose(b["label"].get<std::string>(), decision));
    }
    return error(404, "no route " + target);
  } catch (const SessionError& e) {
    return error(e.status(), e.what());
  } catch (const uci::EngineError& e) {
    return error(500, std::string("engine failure: ") + e.what());
  }
}

namespace detail {

/// Pushes session events to one WebSocket client. The first message is
/// {event: "hello", state}; then every event in order.
class EventSocket : public std::enable_shared_from_this<EventSocket> {
 public:
  EventSocket(tcp::socket&& socket, std::shared_ptr<Session> session)
      : ws_(std::move(socket)), session_(std::move(session)) {}

  void run(HttpRequest req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&EventSocket::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<EventSocket> weak = shared_from_this();
    auto ex = ws_.get_executor();
    token_ = session_->subscribe([weak, ex](const nlohmann::json& ev) {
      net::post(ex, [weak, msg = ev.dump()] {
        if (auto self = weak.lock()) self->send(msg);
      });
    });
    subscribed_ = true;
    send(nlohmann::json{{"event", "hello"}, {"session", session_->id()}, {"state", session_->snapshot()}}.dump());
    read();
  }

  void read() {
    ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->in_.consume(self->in_.size());
      self->read();
    });
  }

  void send(std::string msg) {
    if (closed_) return;
    out_.push_back(std::move(msg));
    if (out_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->out_.pop_front();
      if (!self->out_.empty()) self->write();
    });
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    if (subscribed_) session_->unsubscribe(token_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<Session> session_;
  beast::flat_buffer in_;
  std::deque<std::string> out_;
  std::size_t token_ = 0;
  bool subscribed_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, SessionManager& mgr) : stream_(std::move(socket)), mgr_(mgr) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buf_, req_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return shutdown();
    if (websocket::is_upgrade(req_)) return upgrade();
    stream_.expires_never();  // engines may think for a while
    respond(handle_request(mgr_, req_));
  }

  void upgrade() {
    static const std::regex events_re("^/sessions/([A-Za-z0-9_-]+)/events/?$");
    const std::string target(req_.target());
    std::smatch m;
    if (!std::regex_match(target, m, events_re)) {
      return respond(handle_request(mgr_, HttpRequest{http::verb::get, "/no-such-route", req_.version()}));
    }
    std::shared_ptr<Session> s;
    try {
      s = mgr_.get(m[1]);
    } catch (const SessionError& e) {
      HttpResponse res{http::status::not_found, req_.version()};
      res.set(http::field::content_type, "application/json");
      res.body() = nlohmann::json{{"error", e.what()}}.dump();
      res.prepare_payload();
      return respond(std::move(res));
    }
    stream_.expires_never();
    std::make_shared<EventSocket>(stream_.release_socket(), std::move(s))->run(std::move(req_));
  }

  void respond(HttpResponse res) {
    res_ = std::make_shared<HttpResponse>(std::move(res));
    http::async_write(stream_, *res_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->shutdown();
      if (!self->res_->keep_alive()) return self->shutdown();
      self->read();
    });
  }

  void shutdown() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  SessionManager& mgr_;
  beast::flat_buffer buf_;
  HttpRequest req_;
  std::shared_ptr<HttpResponse> res_;
};

}  // namespace detail

/// HTTP + WebSocket front end for a SessionManager. Port 0 binds an
/// ephemeral port; see port().
class Server {
 public:
  Server(SessionManager& mgr, const std::string& address, unsigned short port, int threads = 4)
      : mgr_(mgr), ioc_(threads), acceptor_(net::make_strand(ioc_)), threads_(std::max(1, threads)) {
    const tcp::endpoint ep{net::ip::make_address(address), port};
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(net::socket_base::max_listen_connections);
    accept();
  }

  ~Server() { stop(); }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  /// Serves on background threads until stop().
  void start() {
    for (int i = 0; i < threads_; ++i) pool_.emplace_back([this] { ioc_.run(); });
  }

  /// Serves on the calling thread (plus threads - 1 helpers) until stopped.
  void run() {
    for (int i = 1; i < threads_; ++i) pool_.emplace_back([this] { ioc_.run(); });
    ioc_.run();
  }

  void stop() {
    ioc_.stop();
    for (auto& t : pool_)
      if (t.joinable()) t.join();
    pool_.clear();
  }

 private:
  void accept() {
    acceptor_.async_accept(net::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<detail::HttpConnection>(std::move(socket), mgr_)->run();
      if (acceptor_.is_open()) accept();
    });
  }

  SessionManager& mgr_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  int threads_;
  std::vector<std::thread> pool_;
};

}  // namespace centaur::harness
