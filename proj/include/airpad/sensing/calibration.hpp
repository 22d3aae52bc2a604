// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "airpad/sensing/geometry.hpp"

namespace airpad::sensing {

/// One scan of the four receiving pads, normalized to [0, 1].
struct ChannelFrame {
  double t_s = 0.0;
  std::array<double, kNumPads> values{};

  double a() const { return values[0]; }
  double b() const { return values[1]; }
  double c() const { return values[2]; }
  double d() const { return values[3]; }
  double operator[](Pad p) const { return values[static_cast<std::size_t>(p)]; }

  friend bool operator==(const ChannelFrame&, const ChannelFrame&) = default;
};

/// Half a second of idle scans at 80 Hz.
inline constexpr std::size_t kDefaultCalibrationFrames = 40;

/// Per-channel baseline used to null the no-hand output, emulating the
/// reference-oscillator trim done before scanning.
struct CalibrationState {
  std::array<double, kNumPads> baseline{};
  std::size_t frames_accumulated = 0;

  /// Baseline-subtracted frame, each channel clamped to [0, 1].
  ChannelFrame apply(const ChannelFrame& raw) const;
};

/// Baseline = per-channel mean of the idle frames.
/// Throws kInsufficientIdleFrames when fewer than `min_frames` are given.
CalibrationState calibrate(std::span<const ChannelFrame> idle,
                           std::size_t min_frames = kDefaultCalibrationFrames);

}  // namespace airpad::sensing
