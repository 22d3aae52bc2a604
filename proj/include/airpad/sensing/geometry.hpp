// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace airpad::sensing {

/// Receiving electrodes, in the order they are scanned within a cycle.
enum class Pad : std::size_t { kA = 0, kB = 1, kC = 2, kD = 3 };
inline constexpr std::size_t kNumPads = 4;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Vec3& p, const Vec3& q);

/// Pad centers in cm. The transmit electrode sits at the origin.
///
/// Pad-A/Pad-D must mirror through x = 0 and Pad-B/Pad-C through y = 0, all in
/// the z = 0 plane, so that A - D reads out x and B - C reads out y.
struct ElectrodeLayout {
  std::array<Vec3, kNumPads> pads{};
  double pad_radius_cm = 1.0;

  static ElectrodeLayout standard(double offset_cm = 3.0);

  const Vec3& pad(Pad p) const { return pads[static_cast<std::size_t>(p)]; }

  /// Throws Error(kConfigError) when the mirror or planarity invariants fail.
  void validate() const;
};

struct SensorConfig {
  double lambda_cm = 4.0;
  double noise_sigma = 0.003;
  int scan_rate_hz = 80;
  int internal_rate_hz = 20000;
  double filter_cutoff_hz = 72.3;
  int adc_bits = 10;
  /// Uncalibrated output level with no hand present (comparator offset).
  double idle_offset = 0.05;
  /// Hold each pad at its own slot (A, B, C, D spread over the cycle) instead
  /// of holding all four together at the cycle end. Staggered holds break
  /// exact mirror symmetry while the hand moves.
  bool staggered_hold = false;
  std::uint64_t seed = 0;

  void validate() const;
  int ticks_per_scan() const { return internal_rate_hz / scan_rate_hz; }
  double adc_full_scale() const;
};

struct HandSample {
  double t_s = 0.0;
  double x_cm = 0.0;
  double y_cm = 0.0;
  double z_cm = 0.0;

  Vec3 position() const { return {x_cm, y_cm, z_cm}; }
};

/// Noise-free proximity response of each pad, s_e = exp(-r_e / lambda).
/// Each value lies in (0, 1] and strictly decreases with hand-pad distance.
std::array<double, kNumPads> channel_response(const HandSample& hand,
                                              const ElectrodeLayout& layout,
                                              const SensorConfig& cfg);

std::array<double, kNumPads> channel_response(const Vec3& hand,
                                              const ElectrodeLayout& layout,
                                              double lambda_cm);

}  // namespace airpad::sensing
