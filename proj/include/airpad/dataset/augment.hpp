// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "airpad/gesture/raster.hpp"

namespace airpad::dataset {

using gesture::DigitImage;

/// Random rotation, zoom and shift ranges for label-preserving augmentation.
struct AugmentConfig {
  double rotation_min_deg = 0.0;
  double rotation_max_deg = 180.0;
  double zoom_min = 0.9;
  double zoom_max = 1.1;
  /// Shift as a fraction of image width/height.
  double shift_min = -0.1;
  double shift_max = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AffineParams {
  double rotation_deg = 0.0;
  double zoom = 1.0;
  double shift_x = 0.0;  // fraction of width, positive moves content right
  double shift_y = 0.0;  // fraction of height, positive moves content down
};

AffineParams sample_affine(const AugmentConfig& cfg, std::mt19937_64& rng);

/// Rotation about the image center (counter-clockwise as displayed), then
/// zoom about the center, then shift; one inverse-mapped affine with bilinear
/// sampling and zero fill. Label is carried over.
DigitImage apply_affine(const DigitImage& image, const AffineParams& params);

DigitImage augment(const DigitImage& image, const AugmentConfig& cfg, std::mt19937_64& rng);

/// Augments every image with a stream derived from (cfg.seed, index).
std::vector<DigitImage> augment_all(std::span<const DigitImage> images, const AugmentConfig& cfg);

}  // namespace airpad::dataset
