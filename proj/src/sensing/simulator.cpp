// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::sensing {

namespace {

std::array<OnePoleLowpass, kNumPads> make_filters(const SensorConfig& cfg) {
  const OnePoleLowpass f(cfg.filter_cutoff_hz, cfg.internal_rate_hz);
  return {f, f, f, f};
}

const SensorConfig& validated(const SensorConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

SensorSimulator::SensorSimulator(ElectrodeLayout layout, SensorConfig cfg)
    : layout_(layout),
      cfg_(validated(cfg)),
      rng_(cfg.seed),
      filters_(make_filters(cfg_)) {
  layout_.validate();
  const int ticks = cfg_.ticks_per_scan();
  for (std::size_t e = 0; e < kNumPads; ++e) {
    slot_tick_[e] = cfg_.staggered_hold ? static_cast<int>((e + 1) * ticks / kNumPads) : ticks;
  }
}

double SensorSimulator::quantize(double v) const {
  const double full = cfg_.adc_full_scale();
  return std::round(std::clamp(v, 0.0, 1.0) * full) / full;
}

template <typename ResponseFn>
ChannelFrame SensorSimulator::cycle(ResponseFn&& response_at_tick, double frame_time) {
  const int ticks = cfg_.ticks_per_scan();
  std::array<double, kNumPads> held{};
  for (int j = 1; j <= ticks; ++j) {
    const std::array<double, kNumPads> s = response_at_tick(j);
    for (std::size_t e = 0; e < kNumPads; ++e) {
      double u = cfg_.idle_offset + s[e];
      if (cfg_.noise_sigma > 0.0) u += cfg_.noise_sigma * noise_(rng_);
      const double y = filters_[e].step(u);
      if (j == slot_tick_[e]) held[e] = y;
    }
  }
  ChannelFrame frame;
  frame.t_s = frame_time;
  for (std::size_t e = 0; e < kNumPads; ++e) frame.values[e] = quantize(held[e]);
  return calibration_ ? calibration_->apply(frame) : frame;
}

std::vector<ChannelFrame> SensorSimulator::idle_frames(std::size_t count) {
  std::vector<ChannelFrame> frames;
  frames.reserve(count);
  const auto absent = [](int) { return std::array<double, kNumPads>{}; };
  for (std::size_t i = 0; i < count; ++i) {
    ++idle_scans_;
    frames.push_back(cycle(absent, static_cast<double>(idle_scans_) / cfg_.scan_rate_hz));
  }
  return frames;
}

const CalibrationState& SensorSimulator::calibrate(std::size_t frames) {
  calibration_.reset();
  const auto idle = idle_frames(frames);
  calibration_ = sensing::calibrate(idle);
  return *calibration_;
}

ChannelFrame SensorSimulator::scan_cycle(const Trajectory& traj) {
  if (traj.empty()) throw Error(ErrorCode::kTrajectoryGap, "empty trajectory");
  if (!origin_) origin_ = traj.start_time();
  const std::int64_t ticks = cfg_.ticks_per_scan();
  const double fs = cfg_.internal_rate_hz;
  const std::int64_t first_tick = scan_index_ * ticks;
  const double t_begin = *origin_ + static_cast<double>(first_tick) / fs;
  const double t_end = *origin_ + static_cast<double>(first_tick + ticks) / fs;
  if (!traj.covers(t_begin, t_end)) {
    throw Error(ErrorCode::kTrajectoryGap,
                "scan interval [" + std::to_string(t_begin) + ", " + std::to_string(t_end) +
                    "] not covered by hand samples");
  }
  const double origin = *origin_;
  const auto along_traj = [&](int j) {
    const double t = origin + static_cast<double>(first_tick + j) / fs;
    return channel_response(traj.position_at(t), layout_, cfg_.lambda_cm);
  };
  ChannelFrame frame = cycle(along_traj, t_end);
  ++scan_index_;
  return frame;
}

std::vector<ChannelFrame> SensorSimulator::run(const Trajectory& traj) {
  std::vector<ChannelFrame> frames;
  if (traj.empty()) return frames;
  const double origin = origin_.value_or(traj.start_time());
  const std::int64_t ticks = cfg_.ticks_per_scan();
  const double fs = cfg_.internal_rate_hz;
  while (true) {
    const double t_end = origin + static_cast<double>((scan_index_ + 1) * ticks) / fs;
    const double t_begin = origin + static_cast<double>(scan_index_ * ticks) / fs;
    if (!traj.covers(t_begin, t_end)) break;
    frames.push_back(scan_cycle(traj));
  }
  return frames;
}

std::vector<ChannelFrame> SensorSimulator::feed(const HandSample& sample) {
  stream_.append(sample);
  auto frames = run(stream_);
  if (origin_) {
    const double next_begin =
        *origin_ + static_cast<double>(scan_index_ * cfg_.ticks_per_scan()) / cfg_.internal_rate_hz;
    stream_.discard_before(next_begin);
  }
  return frames;
}

void SensorSimulator::restart_clock() {
  origin_.reset();
  scan_index_ = 0;
  stream_ = Trajectory{};
}

}  // namespace airpad::sensing
