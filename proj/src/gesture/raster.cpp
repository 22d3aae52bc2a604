// SPDX-License-Identifier: Apache-2.0
#include "airpad/gesture/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::gesture {

std::array<std::uint8_t, kImagePixels> DigitImage::to_bytes() const {
  std::array<std::uint8_t, kImagePixels> out{};
  for (std::size_t i = 0; i < kImagePixels; ++i) {
    const float v = std::clamp(pixels[i], 0.0f, 1.0f);
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  return out;
}

DigitImage DigitImage::from_bytes(std::span<const std::uint8_t> bytes,
                                  std::optional<std::uint8_t> label) {
  if (bytes.size() != kImagePixels) {
    throw Error(ErrorCode::kPayloadSizeMismatch,
                "expected 784 bytes, got " + std::to_string(bytes.size()));
  }
  DigitImage img;
  img.label = label;
  for (std::size_t i = 0; i < kImagePixels; ++i) img.pixels[i] = bytes[i] / 255.0f;
  return img;
}

DigitImage DigitImage::quantized() const {
  const auto bytes = to_bytes();
  return from_bytes(bytes, label);
}

std::vector<Point2> normalize_trace(std::span<const Point2> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyTrace, "cannot normalize an empty trace");
  double x_min = points[0].x, x_max = points[0].x;
  double y_min = points[0].y, y_max = points[0].y;
  for (const auto& p : points) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double extent = std::max(x_max - x_min, y_max - y_min);
  const double scale = extent > 0.0 ? kTargetBoxFraction / extent : 0.0;
  const double cx = 0.5 * (x_min + x_max);
  const double cy = 0.5 * (y_min + y_max);

  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    out.push_back({0.5 + (p.x - cx) * scale, 0.5 + (p.y - cy) * scale});
  }
  return out;
}

std::vector<Point2> normalize_trace(const GestureTrace& trace) {
  std::vector<Point2> xy;
  xy.reserve(trace.points.size());
  for (const auto& c : trace.points) xy.push_back({c.x_u, c.y_u});
  return normalize_trace(xy);
}

namespace {

double squared_distance_to_segment(double px, double py, double ax, double ay, double bx,
                                   double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
  const double qx = ax + t * dx - px;
  const double qy = ay + t * dy - py;
  return qx * qx + qy * qy;
}

}  // namespace

DigitImage rasterize(std::span<const Point2> polyline, const RasterConfig& cfg) {
  if (polyline.empty()) throw Error(ErrorCode::kEmptyTrace, "cannot rasterize an empty polyline");
  const int n = cfg.canvas_px;
  if (n != static_cast<int>(kImageSide) * cfg.downsample) {
    throw Error(ErrorCode::kConfigError, "canvas_px must equal 28 * downsample");
  }
  std::vector<std::uint8_t> canvas(static_cast<std::size_t>(n) * n, 0);
  const double r = cfg.stroke_radius_px;
  const double r2 = r * r;

  // Canvas pixel (row, col) has its center at (col + 0.5, row + 0.5); y is flipped.
  const auto to_canvas = [n](const Point2& p) { return Point2{p.x * n, (1.0 - p.y) * n}; };
  const auto stamp = [&](Point2 a, Point2 b) {
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r - 0.5)));
    const int c1 = std::min(n - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r - 0.5)));
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r - 0.5)));
    const int r1 = std::min(n - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r - 0.5)));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        if (squared_distance_to_segment(col + 0.5, row + 0.5, a.x, a.y, b.x, b.y) <= r2) {
          canvas[static_cast<std::size_t>(row) * n + col] = 1;
        }
      }
    }
  };

  if (polyline.size() == 1) {
    const Point2 p = to_canvas(polyline[0]);
    stamp(p, p);
  }
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    stamp(to_canvas(polyline[i - 1]), to_canvas(polyline[i]));
  }

  DigitImage img;
  const int k = cfg.downsample;
  const float inv_area = 1.0f / static_cast<float>(k * k);
  for (std::size_t row = 0; row < kImageSide; ++row) {
    for (std::size_t col = 0; col < kImageSide; ++col) {
      int sum = 0;
      for (int dr = 0; dr < k; ++dr) {
        const std::size_t base = (row * k + dr) * n + col * k;
        for (int dc = 0; dc < k; ++dc) sum += canvas[base + dc];
      }
      img.at(row, col) = static_cast<float>(sum) * inv_area;
    }
  }
  return img;
}

}  // namespace airpad::gesture
