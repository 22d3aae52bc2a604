// SPDX-License-Identifier: Apache-2.0
#include "airpad/service/registry.hpp"

namespace airpad::service {

SessionRegistry::SessionRegistry(std::shared_ptr<const nn::ModelBundle> model,
                                 SessionConfig defaults, Clock::duration idle_timeout)
    : model_(std::move(model)), defaults_(std::move(defaults)), idle_timeout_(idle_timeout) {}

std::string SessionRegistry::create(Clock::time_point now) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
  }
  // Calibration runs outside the map lock.
  auto entry = std::make_shared<Entry>(Session(id, model_, defaults_), now);
  std::lock_guard lock(mu_);
  sessions_.emplace(id, std::move(entry));
  return id;
}

std::vector<Outbound> SessionRegistry::dispatch(const std::string& id, std::string_view text,
                                                Clock::time_point now) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "no session '" + id + "'");
    }
    entry = it->second;
  }
  std::lock_guard lock(entry->mu);
  entry->last_active = now;
  return entry->session.handle_text(text);
}

bool SessionRegistry::contains(const std::string& id) const {
  std::lock_guard lock(mu_);
  return sessions_.count(id) > 0;
}

bool SessionRegistry::remove(const std::string& id) {
  std::lock_guard lock(mu_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::vector<std::string> SessionRegistry::reap(Clock::time_point now) {
  std::vector<std::string> reaped;
  std::lock_guard lock(mu_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    Clock::time_point last;
    {
      std::lock_guard entry_lock(it->second->mu);
      last = it->second->last_active;
    }
    if (now - last > idle_timeout_) {
      reaped.push_back(it->first);
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  return reaped;
}

}  // namespace airpad::service
