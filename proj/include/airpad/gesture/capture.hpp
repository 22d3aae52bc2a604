// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "airpad/gesture/raster.hpp"
#include "airpad/gesture/segmenter.hpp"
#include "airpad/sensing/simulator.hpp"

namespace airpad::gesture {

struct CaptureResult {
  std::vector<sensing::ChannelFrame> frames;
  std::vector<GestureTrace> gestures;
  std::size_t started = 0;
  std::size_t discarded = 0;
};

/// Offline run of the whole front end on one recorded trajectory: a fresh
/// simulator is calibrated on idle frames, the trajectory is scanned, and
/// every frame is reconstructed and fed to a fresh segmenter.
CaptureResult capture(std::span<const sensing::HandSample> samples,
                      const sensing::ElectrodeLayout& layout,
                      const sensing::SensorConfig& sensor_cfg,
                      const SegmenterConfig& seg_cfg = {});

/// normalize_trace followed by rasterize.
DigitImage render_gesture(const GestureTrace& trace);

}  // namespace airpad::gesture
