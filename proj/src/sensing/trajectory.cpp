// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::sensing {

namespace {
constexpr double kTimeSlack = 1e-9;
}

Trajectory::Trajectory(std::span<const HandSample> samples) {
  for (const auto& s : samples) append(s);
}

void Trajectory::append(const HandSample& sample) {
  if (!std::isfinite(sample.t_s) || !std::isfinite(sample.x_cm) ||
      !std::isfinite(sample.y_cm) || !std::isfinite(sample.z_cm)) {
    throw Error(ErrorCode::kInvalidArgument, "hand sample has non-finite fields");
  }
  if (sample.z_cm < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "hand sample below the pad plane (z < 0)");
  }
  if (!samples_.empty() && !(sample.t_s > samples_.back().t_s)) {
    throw Error(ErrorCode::kOutOfOrderTimestamp,
                "t=" + std::to_string(sample.t_s) + " does not follow t=" +
                    std::to_string(samples_.back().t_s));
  }
  samples_.push_back(sample);
}

double Trajectory::start_time() const {
  if (samples_.empty()) throw Error(ErrorCode::kTrajectoryGap, "empty trajectory");
  return samples_.front().t_s;
}

double Trajectory::end_time() const {
  if (samples_.empty()) throw Error(ErrorCode::kTrajectoryGap, "empty trajectory");
  return samples_.back().t_s;
}

bool Trajectory::covers(double t0, double t1) const {
  if (samples_.empty()) return false;
  return t0 >= samples_.front().t_s - kTimeSlack && t1 <= samples_.back().t_s + kTimeSlack;
}

Vec3 Trajectory::position_at(double t) const {
  if (samples_.empty()) throw Error(ErrorCode::kTrajectoryGap, "empty trajectory");
  if (t <= samples_.front().t_s) return samples_.front().position();
  if (t >= samples_.back().t_s) return samples_.back().position();
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const HandSample& s) { return v < s.t_s; });
  auto lo = std::prev(hi);
  const double w = (t - lo->t_s) / (hi->t_s - lo->t_s);
  return {lo->x_cm + w * (hi->x_cm - lo->x_cm), lo->y_cm + w * (hi->y_cm - lo->y_cm),
          lo->z_cm + w * (hi->z_cm - lo->z_cm)};
}

void Trajectory::discard_before(double t) {
  while (samples_.size() >= 2 && samples_[1].t_s <= t) samples_.pop_front();
}

}  // namespace airpad::sensing
