// SPDX-License-Identifier: Apache-2.0
#include "airpad/gesture/segmenter.hpp"

#include <string>
#include <utility>

#include "airpad/error.hpp"

namespace airpad::gesture {

void SegmenterConfig::validate() const {
  if (!(z_off > 0.0) || !(z_on > z_off)) {
    throw Error(ErrorCode::kConfigError, "segmenter thresholds need z_on > z_off > 0");
  }
  if (min_points == 0) throw Error(ErrorCode::kConfigError, "min_points must be >= 1");
}

Segmenter::Segmenter(SegmenterConfig cfg) : cfg_(cfg) { cfg_.validate(); }

SegmentEvent Segmenter::step(const Coordinate& coord) {
  if (last_t_ && !(coord.t_s > *last_t_)) {
    throw Error(ErrorCode::kOutOfOrderTimestamp,
                "coordinate t=" + std::to_string(coord.t_s) + " after t=" +
                    std::to_string(*last_t_));
  }
  last_t_ = coord.t_s;

  SegmentEvent ev;
  if (mode_ == Mode::kIdle) {
    if (coord.z_u >= cfg_.z_on) {
      mode_ = Mode::kActive;
      trace_.clear();
      trace_.push_back(coord);
      ev.kind = SegmentEventKind::kStarted;
    }
    return ev;
  }

  if (coord.z_u < cfg_.z_off) {
    mode_ = Mode::kIdle;
    if (trace_.size() >= cfg_.min_points) {
      GestureTrace done;
      done.start_t = trace_.front().t_s;
      done.end_t = trace_.back().t_s;
      done.points = std::move(trace_);
      ev.kind = SegmentEventKind::kCompleted;
      ev.trace = std::move(done);
    } else {
      ev.kind = SegmentEventKind::kDiscarded;
      ev.discarded_points = trace_.size();
    }
    trace_.clear();
    return ev;
  }

  trace_.push_back(coord);
  ev.kind = SegmentEventKind::kPoint;
  return ev;
}

void Segmenter::reset() {
  mode_ = Mode::kIdle;
  trace_.clear();
  last_t_.reset();
}

}  // namespace airpad::gesture
