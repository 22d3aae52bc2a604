// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "airpad/gesture/capture.hpp"
#include "airpad/gesture/raster.hpp"
#include "airpad/sensing/geometry.hpp"

namespace airpad::dataset {

using gesture::DigitImage;
using gesture::Point2;

struct SynthConfig {
  std::size_t per_class = 1000;
  /// Control-point Gaussian sigma, as a fraction of the unit square.
  double jitter = 0.04;
  /// Drawing duration and in-stroke speed vary by +/- this fraction.
  double speed_variation = 0.2;
  double approach_z_cm = 8.0;
  double retract_z_cm = 8.5;
  double draw_z_cm = 2.5;
  double draw_z_wobble_cm = 0.5;
  /// Side of the square, centered over the transmit pad, that the unit-square template maps to.
  double draw_span_cm = 4.0;
  double sample_rate_hz = 200.0;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Approach (hand descends from approach_z to the drawing height at the
/// stroke start), drawing (jittered template traced with smooth speed at
/// draw_z +/- wobble) and retract (hand rises above retract_z at the stroke
/// end). Total duration stays within [1, 2] s.
std::vector<sensing::HandSample> synth_trajectory(int digit, const SynthConfig& cfg,
                                                  std::mt19937_64& rng);

/// synth_trajectory plus the paths it traced.
struct SynthDetail {
  std::vector<sensing::HandSample> samples;
  std::vector<Point2> template_path;  // un-jittered spline, unit square
  std::vector<Point2> drawn_path;     // jittered spline actually traced, unit square
  double draw_begin_s = 0.0;
  double draw_end_s = 0.0;
};
SynthDetail synth_trajectory_detail(int digit, const SynthConfig& cfg, std::mt19937_64& rng);

struct Dataset {
  std::vector<DigitImage> train;
  std::vector<DigitImage> test;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct BuildReport {
  std::size_t trajectories = 0;
  std::size_t failures = 0;  // trajectories that did not give exactly one gesture
};

struct BuildResult {
  Dataset dataset;
  BuildReport report;
};

/// Maximum tolerated fraction of trajectories that fail segmentation.
inline constexpr double kMaxSegmentationFailureRate = 0.01;

/// Synthesize -> simulate -> segment -> rasterize for per_class trajectories
/// of each digit, then split every class 8:2 after a seeded shuffle. Each
/// trajectory draws from its own stream seeded by (seed, class, index), so
/// the output does not depend on `threads`. A failed trajectory is replaced by
/// a re-draw; more than 1% failures throws kSegmentationFailure.
BuildResult build_dataset(const SynthConfig& cfg, const sensing::SensorConfig& sensor_cfg,
                          unsigned threads = 1);

/// One labeled image from one freshly synthesized trajectory, or nullopt when
/// segmentation did not produce exactly one gesture.
std::optional<DigitImage> synth_image(int digit, const SynthConfig& cfg,
                                      const sensing::SensorConfig& sensor_cfg,
                                      std::uint64_t stream_seed);

}  // namespace airpad::dataset
