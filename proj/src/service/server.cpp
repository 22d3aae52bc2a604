// SPDX-License-Identifier: Apache-2.0
#include "airpad/service/server.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fstream>
#include <iterator>
#include <thread>
#include <vector>

#include "airpad/service/outbound_queue.hpp"

namespace airpad::service {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

constexpr std::size_t kMaxBody = 1 << 20;

Response json_response(const Request& req, http::status status, const nlohmann::json& body) {
  Response res{status, req.version()};
  res.set(http::field::content_type, "application/json");
  res.keep_alive(req.keep_alive());
  res.body() = body.dump();
  res.prepare_payload();
  return res;
}

Response error_response(const Request& req, http::status status, ErrorCode code,
                        const std::string& msg) {
  return json_response(req, status, {{"code", error_code_name(code)}, {"msg", msg}});
}

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".map" || ext == ".txt") return "text/plain";
  return "application/octet-stream";
}

// ---------------------------------------------------------------------------

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket&& socket, SessionRegistry& registry, std::size_t queue_capacity)
      : ws_(std::move(socket)), registry_(registry), queue_(queue_capacity) {}

  ~WsConnection() {
    if (!id_.empty()) registry_.remove(id_);
  }

  void accept(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    id_ = registry_.create();
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    bool alive = true;
    if (!ws_.got_text()) {
      queue_.push(ErrorMsg{ErrorCode::kMalformedMessage, "binary frames are not supported"});
    } else {
      try {
        for (auto& m : registry_.dispatch(id_, text)) queue_.push(std::move(m));
      } catch (const Error& e) {
        queue_.push(ErrorMsg{e.code(), e.what()});
        alive = false;  // session reaped
      }
    }
    closing_ = !alive;
    flush();
    if (alive) read();
  }

  void flush() {
    if (writing_) return;
    auto next = queue_.pop();
    if (!next) {
      if (closing_) {
        ws_.async_close(websocket::close_code::going_away,
                        [self = shared_from_this()](beast::error_code) {});
      }
      return;
    }
    writing_ = true;
    out_ = to_json_text(*next);
    ws_.text(true);
    ws_.async_write(asio::buffer(out_),
                    beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) return;
    flush();
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionRegistry& registry_;
  OutboundQueue queue_;
  beast::flat_buffer buffer_;
  std::string id_;
  std::string out_;
  bool writing_ = false;
  bool closing_ = false;
};

// ---------------------------------------------------------------------------

struct Shared {
  ServerConfig cfg;
  std::shared_ptr<const nn::ModelBundle> model;
  SessionRegistry registry;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Shared& shared)
      : stream_(std::move(socket)), shared_(shared) {}

  void start() {
    asio::dispatch(stream_.get_executor(),
                   beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(kMaxBody);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    Request req = parser_->release();
    if (websocket::is_upgrade(req)) {
      if (req.target() == "/ws/session") {
        stream_.expires_never();
        std::make_shared<WsConnection>(stream_.release_socket(), shared_.registry,
                                       shared_.cfg.queue_capacity)
            ->accept(std::move(req));
        return;
      }
      send(error_response(req, http::status::not_found, ErrorCode::kInvalidArgument,
                          "no websocket endpoint at " + std::string(req.target())));
      return;
    }
    send(route(req));
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    const bool close = sp->need_eof();
    http::async_write(stream_, *sp,
                      [self = shared_from_this(), sp, close](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (close) {
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                          return;
                        }
                        self->read();
                      });
  }

  Response route(const Request& req) {
    const std::string target(req.target().substr(0, req.target().find('?')));
    if (target == "/api/health") {
      if (req.method() != http::verb::get) return method_not_allowed(req);
      return json_response(req, http::status::ok,
                           {{"status", "ok"},
                            {"model_loaded", shared_.model != nullptr},
                            {"sessions", shared_.registry.size()}});
    }
    if (target == "/api/model/info") {
      if (req.method() != http::verb::get) return method_not_allowed(req);
      if (!shared_.model) {
        return error_response(req, http::status::service_unavailable, ErrorCode::kNoModelLoaded,
                              "no model loaded");
      }
      return json_response(req, http::status::ok, shared_.model->header());
    }
    if (target == "/api/classify") {
      if (req.method() != http::verb::post) return method_not_allowed(req);
      return classify(req);
    }
    if (target.rfind("/api/", 0) == 0 || target.rfind("/ws/", 0) == 0) {
      return error_response(req, http::status::not_found, ErrorCode::kInvalidArgument,
                            "unknown endpoint " + target);
    }
    return serve_static(req, target);
  }

  Response method_not_allowed(const Request& req) {
    return error_response(req, http::status::method_not_allowed, ErrorCode::kInvalidArgument,
                          "method not allowed");
  }

  Response classify(const Request& req) {
    try {
      std::vector<std::uint8_t> bytes;
      const auto ct = req[http::field::content_type];
      if (ct.find("application/json") != beast::string_view::npos) {
        const auto j = nlohmann::json::parse(req.body(), nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("image") ||
            !j["image"].is_string()) {
          throw Error(ErrorCode::kMalformedMessage, "expected {\"image\": base64}");
        }
        bytes = base64_decode(j["image"].get<std::string>());
      } else {
        bytes.assign(req.body().begin(), req.body().end());
      }
      const auto image = gesture::DigitImage::from_bytes(bytes);
      if (!shared_.model) throw Error(ErrorCode::kNoModelLoaded, "no model loaded");
      const nn::Prediction p = nn::predict(*shared_.model, image);
      return json_response(req, http::status::ok,
                           {{"digit", p.digit},
                            {"confidence", p.confidence},
                            {"probs", p.probabilities}});
    } catch (const Error& e) {
      const auto status = e.code() == ErrorCode::kNoModelLoaded ? http::status::service_unavailable
                                                                 : http::status::bad_request;
      return error_response(req, status, e.code(), e.what());
    }
  }

  Response serve_static(const Request& req, const std::string& target) {
    if (!shared_.cfg.static_dir) {
      return error_response(req, http::status::not_found, ErrorCode::kInvalidArgument,
                            "not found: " + target);
    }
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return method_not_allowed(req);
    }
    if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos ||
        target.find('\0') != std::string::npos) {
      return error_response(req, http::status::bad_request, ErrorCode::kInvalidArgument,
                            "bad path");
    }
    std::filesystem::path path = *shared_.cfg.static_dir / target.substr(1);
    if (target.back() == '/') path /= "index.html";
    std::ifstream in(path, std::ios::binary);
    if (!in || std::filesystem::is_directory(path)) {
      return error_response(req, http::status::not_found, ErrorCode::kInvalidArgument,
                            "not found: " + target);
    }
    Response res{http::status::ok, req.version()};
    res.set(http::field::content_type, mime_type(path));
    res.keep_alive(req.keep_alive());
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (req.method() == http::verb::head) {
      res.content_length(body.size());
    } else {
      res.body() = std::move(body);
      res.prepare_payload();
    }
    return res;
  }

  beast::tcp_stream stream_;
  Shared& shared_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

}  // namespace

// ---------------------------------------------------------------------------

struct Server::Impl {
  Impl(ServerConfig cfg, std::shared_ptr<const nn::ModelBundle> model)
      : shared{cfg, model, SessionRegistry(model, cfg.session, cfg.idle_timeout)},
        acceptor(ioc),
        reaper(ioc) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (!ec) std::make_shared<HttpConnection>(std::move(s), shared)->start();
      if (acceptor.is_open()) accept();
    });
  }

  void schedule_reap() {
    reaper.expires_after(shared.cfg.reap_interval);
    reaper.async_wait([this](beast::error_code ec) {
      if (ec) return;
      shared.registry.reap();
      schedule_reap();
    });
  }

  Shared shared;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  asio::steady_timer reaper;
  std::vector<std::thread> threads;
  unsigned short bound_port = 0;
};

Server::Server(ServerConfig cfg, std::shared_ptr<const nn::ModelBundle> model)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(model))) {}

Server::~Server() { stop(); }

unsigned short Server::start() {
  auto& im = *impl_;
  const tcp::endpoint ep(asio::ip::make_address(im.shared.cfg.address), im.shared.cfg.port);
  im.acceptor.open(ep.protocol());
  im.acceptor.set_option(asio::socket_base::reuse_address(true));
  im.acceptor.bind(ep);
  im.acceptor.listen(asio::socket_base::max_listen_connections);
  im.bound_port = im.acceptor.local_endpoint().port();
  im.accept();
  im.schedule_reap();
  const int n = std::max(1, im.shared.cfg.threads);
  for (int i = 0; i < n; ++i) im.threads.emplace_back([&im] { im.ioc.run(); });
  return im.bound_port;
}

void Server::wait() {
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
}

void Server::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  wait();
  // no threads left, safe to touch these directly
  beast::error_code ec;
  impl_->acceptor.close(ec);
  impl_->reaper.cancel();
}

unsigned short Server::port() const { return impl_->bound_port; }

SessionRegistry& Server::registry() { return impl_->shared.registry; }

}  // namespace airpad::service
