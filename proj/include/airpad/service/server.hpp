// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "airpad/service/registry.hpp"

namespace airpad::service {

struct ServerConfig {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::chrono::steady_clock::duration idle_timeout = kDefaultIdleTimeout;
  std::chrono::steady_clock::duration reap_interval = std::chrono::seconds(5);
  std::size_t queue_capacity = 256;
  int threads = 1;
  SessionConfig session;
};

/// HTTP + WebSocket front end:
///   GET  /api/health
///   GET  /api/model/info
///   POST /api/classify   (784 raw bytes, or JSON {"image": base64})
///   GET  /ws/session     (StreamMessage protocol)
///   anything else is served from static_dir when configured.
class Server {
 public:
  Server(ServerConfig cfg, std::shared_ptr<const nn::ModelBundle> model);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads; returns the bound port.
  unsigned short start();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

  unsigned short port() const;
  SessionRegistry& registry();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace airpad::service
