// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/geometry.hpp"

#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::sensing {

double distance(const Vec3& p, const Vec3& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

ElectrodeLayout ElectrodeLayout::standard(double offset_cm) {
  ElectrodeLayout layout;
  layout.pads[static_cast<std::size_t>(Pad::kA)] = {+offset_cm, 0.0, 0.0};
  layout.pads[static_cast<std::size_t>(Pad::kB)] = {0.0, +offset_cm, 0.0};
  layout.pads[static_cast<std::size_t>(Pad::kC)] = {0.0, -offset_cm, 0.0};
  layout.pads[static_cast<std::size_t>(Pad::kD)] = {-offset_cm, 0.0, 0.0};
  return layout;
}

void ElectrodeLayout::validate() const {
  for (const auto& p : pads) {
    if (p.z != 0.0) {
      throw Error(ErrorCode::kConfigError, "receiving pads must lie in z = 0");
    }
  }
  const Vec3& a = pad(Pad::kA);
  const Vec3& d = pad(Pad::kD);
  const Vec3& b = pad(Pad::kB);
  const Vec3& c = pad(Pad::kC);
  if (a.x != -d.x || a.y != d.y) {
    throw Error(ErrorCode::kConfigError, "Pad-A and Pad-D must mirror through x = 0");
  }
  if (b.y != -c.y || b.x != c.x) {
    throw Error(ErrorCode::kConfigError, "Pad-B and Pad-C must mirror through y = 0");
  }
  if (!(pad_radius_cm > 0.0)) {
    throw Error(ErrorCode::kConfigError, "pad radius must be positive");
  }
}

void SensorConfig::validate() const {
  if (!(lambda_cm > 0.0)) throw Error(ErrorCode::kConfigError, "lambda_cm must be positive");
  if (noise_sigma < 0.0) throw Error(ErrorCode::kConfigError, "noise_sigma must be >= 0");
  if (scan_rate_hz <= 0 || internal_rate_hz <= 0 || internal_rate_hz % scan_rate_hz != 0) {
    throw Error(ErrorCode::kConfigError,
                "internal_rate_hz must be a positive integer multiple of scan_rate_hz");
  }
  if (internal_rate_hz / scan_rate_hz < static_cast<int>(kNumPads)) {
    throw Error(ErrorCode::kConfigError, "scan cycle needs at least one tick per pad");
  }
  if (!(filter_cutoff_hz > 0.0) || !(filter_cutoff_hz < internal_rate_hz / 2.0)) {
    throw Error(ErrorCode::kConfigError, "filter_cutoff_hz must lie in (0, internal_rate_hz/2)");
  }
  if (adc_bits < 1 || adc_bits > 16) {
    throw Error(ErrorCode::kConfigError, "adc_bits must be in [1, 16]");
  }
  if (idle_offset < 0.0 || idle_offset >= 1.0) {
    throw Error(ErrorCode::kConfigError, "idle_offset must be in [0, 1)");
  }
}

double SensorConfig::adc_full_scale() const {
  return static_cast<double>((1u << adc_bits) - 1u);
}

std::array<double, kNumPads> channel_response(const Vec3& hand,
                                              const ElectrodeLayout& layout,
                                              double lambda_cm) {
  std::array<double, kNumPads> s{};
  for (std::size_t e = 0; e < kNumPads; ++e) {
    s[e] = std::exp(-distance(hand, layout.pads[e]) / lambda_cm);
  }
  return s;
}

std::array<double, kNumPads> channel_response(const HandSample& hand,
                                              const ElectrodeLayout& layout,
                                              const SensorConfig& cfg) {
  return channel_response(hand.position(), layout, cfg.lambda_cm);
}

}  // namespace airpad::sensing
