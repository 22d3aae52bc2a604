// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "airpad/service/messages.hpp"

namespace airpad::service {

/// Bounded per-connection send queue. When full, the oldest channels
/// message is dropped to make room; other message kinds are never dropped,
/// so the queue may exceed its capacity if it holds nothing droppable.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t capacity = 256);

  void push(Outbound msg);
  std::optional<Outbound> pop();
  std::vector<Outbound> drain();

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::size_t dropped() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<Outbound> items_;
  std::size_t dropped_ = 0;
};

}  // namespace airpad::service
