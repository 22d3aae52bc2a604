// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/calibration.hpp"

#include <algorithm>
#include <string>

#include "airpad/error.hpp"

namespace airpad::sensing {

ChannelFrame CalibrationState::apply(const ChannelFrame& raw) const {
  ChannelFrame out;
  out.t_s = raw.t_s;
  for (std::size_t e = 0; e < kNumPads; ++e) {
    out.values[e] = std::clamp(raw.values[e] - baseline[e], 0.0, 1.0);
  }
  return out;
}

CalibrationState calibrate(std::span<const ChannelFrame> idle, std::size_t min_frames) {
  if (idle.size() < min_frames || idle.empty()) {
    throw Error(ErrorCode::kInsufficientIdleFrames,
                "got " + std::to_string(idle.size()) + " idle frames, need " +
                    std::to_string(min_frames));
  }
  CalibrationState state;
  for (const auto& f : idle) {
    for (std::size_t e = 0; e < kNumPads; ++e) state.baseline[e] += f.values[e];
  }
  for (auto& b : state.baseline) {
    b = std::clamp(b / static_cast<double>(idle.size()), 0.0, 1.0);
  }
  state.frames_accumulated = idle.size();
  return state;
}

}  // namespace airpad::sensing
