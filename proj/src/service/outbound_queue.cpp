// SPDX-License-Identifier: Apache-2.0
#include "airpad/service/outbound_queue.hpp"

#include <algorithm>

namespace airpad::service {

OutboundQueue::OutboundQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorCode::kConfigError, "queue capacity must be positive");
}

void OutboundQueue::push(Outbound msg) {
  std::lock_guard lock(mu_);
  if (items_.size() >= capacity_) {
    auto oldest = std::find_if(items_.begin(), items_.end(),
                               [](const Outbound& m) { return droppable(m); });
    if (oldest != items_.end()) {
      items_.erase(oldest);
      ++dropped_;
    } else if (droppable(msg)) {
      ++dropped_;
      return;
    }
  }
  items_.push_back(std::move(msg));
}

std::optional<Outbound> OutboundQueue::pop() {
  std::lock_guard lock(mu_);
  if (items_.empty()) return std::nullopt;
  Outbound m = std::move(items_.front());
  items_.pop_front();
  return m;
}

std::vector<Outbound> OutboundQueue::drain() {
  std::lock_guard lock(mu_);
  std::vector<Outbound> out(std::make_move_iterator(items_.begin()),
                            std::make_move_iterator(items_.end()));
  items_.clear();
  return out;
}

std::size_t OutboundQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

std::size_t OutboundQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

}  // namespace airpad::service
