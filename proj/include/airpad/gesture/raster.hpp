// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "airpad/gesture/segmenter.hpp"

namespace airpad::gesture {

inline constexpr std::size_t kImageSide = 28;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;

/// 28x28 grayscale raster, row-major, row 0 at the top, values in [0, 1].
struct DigitImage {
  std::array<float, kImagePixels> pixels{};
  std::optional<std::uint8_t> label;

  float at(std::size_t row, std::size_t col) const { return pixels[row * kImageSide + col]; }
  float& at(std::size_t row, std::size_t col) { return pixels[row * kImageSide + col]; }

  /// u8 encoding, value = round(pixel * 255).
  std::array<std::uint8_t, kImagePixels> to_bytes() const;
  /// Throws kPayloadSizeMismatch unless exactly 784 bytes are given.
  static DigitImage from_bytes(std::span<const std::uint8_t> bytes,
                               std::optional<std::uint8_t> label = std::nullopt);
  /// Round-trips through the u8 encoding so in-memory and on-disk images match.
  DigitImage quantized() const;

  friend bool operator==(const DigitImage&, const DigitImage&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Fraction of the unit square the normalized stroke's longer side spans.
inline constexpr double kTargetBoxFraction = 20.0 / 28.0;

/// Uniform translate/scale (aspect preserved) so the (x_u, y_u) bounding box
/// is centered at (0.5, 0.5) with its longer side equal to 20/28. A
/// degenerate trace collapses to the center. Throws kEmptyTrace.
std::vector<Point2> normalize_trace(std::span<const Point2> points);
std::vector<Point2> normalize_trace(const GestureTrace& trace);

struct RasterConfig {
  int canvas_px = 140;
  double stroke_radius_px = 7.0;
  int downsample = 5;
};

/// Draws the polyline (unit-square coordinates, y up) with round caps onto a
/// canvas_px^2 binary canvas, then box-averages down to 28x28.
/// Throws kEmptyTrace for an empty polyline.
DigitImage rasterize(std::span<const Point2> polyline, const RasterConfig& cfg = {});

}  // namespace airpad::gesture
