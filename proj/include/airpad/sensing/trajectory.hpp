// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <span>
#include <vector>

#include "airpad/sensing/geometry.hpp"

namespace airpad::sensing {

/// Time-ordered hand samples with linear interpolation between them.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::span<const HandSample> samples);

  /// Throws kOutOfOrderTimestamp unless t strictly increases, and
  /// kInvalidArgument for z < 0 or non-finite values.
  void append(const HandSample& sample);

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  double start_time() const;
  double end_time() const;

  /// True when [t0, t1] lies inside the sampled span (with a 1 ns slack).
  bool covers(double t0, double t1) const;

  /// Position at t, clamped to the end points outside the span.
  Vec3 position_at(double t) const;

  /// Drops samples that can no longer bracket any time >= t.
  void discard_before(double t);

  const std::deque<HandSample>& samples() const { return samples_; }

 private:
  std::deque<HandSample> samples_;
};

}  // namespace airpad::sensing
