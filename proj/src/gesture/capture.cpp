// SPDX-License-Identifier: Apache-2.0
#include "airpad/gesture/capture.hpp"

#include "airpad/gesture/coordinate.hpp"

namespace airpad::gesture {

CaptureResult capture(std::span<const sensing::HandSample> samples,
                      const sensing::ElectrodeLayout& layout,
                      const sensing::SensorConfig& sensor_cfg, const SegmenterConfig& seg_cfg) {
  sensing::SensorSimulator sim(layout, sensor_cfg);
  sim.calibrate();
  const sensing::Trajectory traj(samples);

  CaptureResult result;
  result.frames = sim.run(traj);
  Segmenter segmenter(seg_cfg);
  for (const auto& frame : result.frames) {
    SegmentEvent ev = segmenter.step(reconstruct(frame));
    switch (ev.kind) {
      case SegmentEventKind::kStarted: ++result.started; break;
      case SegmentEventKind::kCompleted: result.gestures.push_back(std::move(*ev.trace)); break;
      case SegmentEventKind::kDiscarded: ++result.discarded; break;
      default: break;
    }
  }
  return result;
}

DigitImage render_gesture(const GestureTrace& trace) {
  const auto polyline = normalize_trace(trace);
  return rasterize(polyline);
}

}  // namespace airpad::gesture
