// SPDX-License-Identifier: Apache-2.0
#include "airpad/dataset/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "airpad/error.hpp"
#include "airpad/random.hpp"

namespace airpad::dataset {

using gesture::kImageSide;

void AugmentConfig::validate() const {
  if (rotation_min_deg < -360.0 || rotation_max_deg > 360.0 ||
      rotation_min_deg > rotation_max_deg) {
    throw Error(ErrorCode::kConfigError, "rotation range must lie within [-360, 360]");
  }
  if (!(zoom_min > 0.0) || zoom_min > zoom_max) {
    throw Error(ErrorCode::kConfigError, "zoom range must be positive and ordered");
  }
  if (shift_min > shift_max) throw Error(ErrorCode::kConfigError, "shift range must be ordered");
}

AffineParams sample_affine(const AugmentConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto pick = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  AffineParams p;
  p.rotation_deg = pick(cfg.rotation_min_deg, cfg.rotation_max_deg);
  p.zoom = pick(cfg.zoom_min, cfg.zoom_max);
  p.shift_x = pick(cfg.shift_min, cfg.shift_max);
  p.shift_y = pick(cfg.shift_min, cfg.shift_max);
  return p;
}

DigitImage apply_affine(const DigitImage& image, const AffineParams& params) {
  constexpr double center = (kImageSide - 1) / 2.0;
  constexpr int side = static_cast<int>(kImageSide);
  const double theta = params.rotation_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double inv_zoom = 1.0 / params.zoom;
  const double sx = params.shift_x * kImageSide;
  const double sy = params.shift_y * kImageSide;

  const auto pixel = [&](int row, int col) -> double {
    if (row < 0 || row >= side || col < 0 || col >= side) return 0.0;
    return image.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
  };

  DigitImage out;
  out.label = image.label;
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      // Inverse of out = c + zoom * R * (in - c) + shift, with x = col, y = row (down).
      const double ex = (col - center - sx) * inv_zoom;
      const double ey = (row - center - sy) * inv_zoom;
      const double x = center + cs * ex - sn * ey;
      const double y = center + sn * ex + cs * ey;
      const double x0 = std::floor(x);
      const double y0 = std::floor(y);
      const double fx = x - x0;
      const double fy = y - y0;
      const int c0 = static_cast<int>(x0);
      const int r0 = static_cast<int>(y0);
      const double v = (1 - fy) * ((1 - fx) * pixel(r0, c0) + fx * pixel(r0, c0 + 1)) +
                       fy * ((1 - fx) * pixel(r0 + 1, c0) + fx * pixel(r0 + 1, c0 + 1));
      out.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) =
          static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

DigitImage augment(const DigitImage& image, const AugmentConfig& cfg, std::mt19937_64& rng) {
  return apply_affine(image, sample_affine(cfg, rng));
}

std::vector<DigitImage> augment_all(std::span<const DigitImage> images, const AugmentConfig& cfg) {
  cfg.validate();
  std::vector<DigitImage> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, {i}));
    out.push_back(augment(images[i], cfg, rng));
  }
  return out;
}

}  // namespace airpad::dataset
