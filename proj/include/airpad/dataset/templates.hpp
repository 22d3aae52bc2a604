// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "airpad/gesture/raster.hpp"

namespace airpad::dataset {

using gesture::Point2;

/// Canonical single-stroke path of a digit in the unit square (y up).
struct DigitTemplate {
  int digit = 0;
  std::vector<Point2> control_points;
};

/// Templates for 0-9. Every digit is one connected stroke with >= 4 points.
const DigitTemplate& digit_template(int digit);

/// Centripetal Catmull-Rom curve through the control points, sampled with
/// `per_segment` points per span. Collinear control points give a collinear curve.
std::vector<Point2> catmull_rom(std::span<const Point2> control, int per_segment = 16);

double polyline_length(std::span<const Point2> points);

/// Point at normalized arc length s in [0, 1].
Point2 point_at_arclength(std::span<const Point2> points, std::span<const double> cumulative,
                          double s);
std::vector<double> cumulative_arclength(std::span<const Point2> points);

}  // namespace airpad::dataset
