// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "airpad/sensing/calibration.hpp"
#include "airpad/sensing/geometry.hpp"
#include "airpad/sensing/lowpass.hpp"
#include "airpad/sensing/trajectory.hpp"

namespace airpad::sensing {

/// Behavioral model of the sensing board and processing chain.
///
/// Every internal tick (internal_rate_hz) each channel receives
/// idle_offset + response + N(0, noise_sigma) and passes through its own
/// one-pole RC filter. All four filtered values are held at the last tick of
/// the cycle (or at evenly spaced A, B, C, D slots with staggered_hold),
/// converted in order A, B, C, D to adc_bits, and emitted as one frame
/// stamped at the end of the cycle. Once a calibration is set,
/// frames leave the simulator baseline-subtracted.
///
/// Single owner; not thread-safe. Deterministic for a fixed config and seed.
class SensorSimulator {
 public:
  SensorSimulator(ElectrodeLayout layout, SensorConfig cfg);

  /// Scan cycles with no hand in range. Timestamps follow a separate idle
  /// clock starting at 1/scan_rate.
  std::vector<ChannelFrame> idle_frames(std::size_t count);

  /// Runs `frames` idle cycles, computes the baseline and installs it.
  const CalibrationState& calibrate(std::size_t frames = kDefaultCalibrationFrames);
  void set_calibration(std::optional<CalibrationState> state) { calibration_ = state; }
  const std::optional<CalibrationState>& calibration() const { return calibration_; }

  /// Next scan cycle on `traj`'s grid; the grid origin is the trajectory
  /// start the first time this is called after construction/restart_clock().
  /// Throws kTrajectoryGap when the cycle interval is not covered.
  ChannelFrame scan_cycle(const Trajectory& traj);

  /// All remaining fully covered cycles of `traj`.
  std::vector<ChannelFrame> run(const Trajectory& traj);

  /// Streaming input: returns the frames completed by this sample.
  std::vector<ChannelFrame> feed(const HandSample& sample);

  /// Starts a new scan grid for the next trajectory. Filter state carries over.
  void restart_clock();

  const SensorConfig& config() const { return cfg_; }
  const ElectrodeLayout& layout() const { return layout_; }

 private:
  template <typename ResponseFn>
  ChannelFrame cycle(ResponseFn&& response_at_tick, double frame_time);
  double quantize(double v) const;

  ElectrodeLayout layout_;
  SensorConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  std::array<OnePoleLowpass, kNumPads> filters_;
  std::array<int, kNumPads> slot_tick_{};
  std::optional<CalibrationState> calibration_;

  std::optional<double> origin_;
  std::int64_t scan_index_ = 0;
  std::int64_t idle_scans_ = 0;
  Trajectory stream_;
};

}  // namespace airpad::sensing
