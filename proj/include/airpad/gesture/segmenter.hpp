// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "airpad/gesture/coordinate.hpp"

namespace airpad::gesture {

struct GestureTrace {
  std::vector<Coordinate> points;
  double start_t = 0.0;
  double end_t = 0.0;
};

struct SegmenterConfig {
  /// Proximity of a hand 4 cm above the pad center under the standard
  /// layout (r = 5 cm, lambda = 4 cm).
  double z_on = std::exp(-1.25);
  double z_off = 0.9 * std::exp(-1.25);
  std::size_t min_points = 8;

  /// Requires z_on > z_off > 0 and min_points >= 1.
  void validate() const;
};

enum class SegmentEventKind { kIdle, kStarted, kPoint, kCompleted, kDiscarded };

struct SegmentEvent {
  SegmentEventKind kind = SegmentEventKind::kIdle;
  /// Set for kCompleted.
  std::optional<GestureTrace> trace;
  /// Number of points the discarded gesture had.
  std::size_t discarded_points = 0;
};

/// Hysteresis segmenter: Idle -> Active when z_u >= z_on, Active -> Idle
/// when z_u < z_off. The coordinate that triggers Started is the first point
/// of the trace; the one that ends the gesture is not included.
class Segmenter {
 public:
  enum class Mode { kIdle, kActive };

  explicit Segmenter(SegmenterConfig cfg = {});

  /// Throws kOutOfOrderTimestamp if t_s does not strictly increase.
  SegmentEvent step(const Coordinate& coord);

  /// Drops any partial gesture, returns to Idle and forgets the last timestamp.
  void reset();

  Mode mode() const { return mode_; }
  const SegmenterConfig& config() const { return cfg_; }
  const std::vector<Coordinate>& current_points() const { return trace_; }

 private:
  SegmenterConfig cfg_;
  Mode mode_ = Mode::kIdle;
  std::vector<Coordinate> trace_;
  std::optional<double> last_t_;
};

}  // namespace airpad::gesture
