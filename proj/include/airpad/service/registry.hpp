// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "airpad/service/session.hpp"

namespace airpad::service {

inline constexpr std::chrono::seconds kDefaultIdleTimeout{300};

/// Owns live sessions. Each session has its own lock, so messages for
/// different sessions never contend beyond the map lookup.
class SessionRegistry {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionRegistry(std::shared_ptr<const nn::ModelBundle> model,
                           SessionConfig defaults = {},
                           Clock::duration idle_timeout = kDefaultIdleTimeout);

  std::string create(Clock::time_point now = Clock::now());

  /// Handles one text frame for session `id`. Throws kInvalidArgument when
  /// the session does not exist (closed or reaped).
  std::vector<Outbound> dispatch(const std::string& id, std::string_view text,
                                 Clock::time_point now = Clock::now());

  bool contains(const std::string& id) const;
  bool remove(const std::string& id);
  std::size_t size() const;

  /// Removes sessions idle for longer than the timeout; returns their ids.
  std::vector<std::string> reap(Clock::time_point now = Clock::now());

  Clock::duration idle_timeout() const { return idle_timeout_; }
  const std::shared_ptr<const nn::ModelBundle>& model() const { return model_; }

 private:
  struct Entry {
    explicit Entry(Session s, Clock::time_point t) : session(std::move(s)), last_active(t) {}
    std::mutex mu;
    Session session;
    Clock::time_point last_active;
  };

  std::shared_ptr<const nn::ModelBundle> model_;
  SessionConfig defaults_;
  Clock::duration idle_timeout_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace airpad::service
