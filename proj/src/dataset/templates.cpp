// SPDX-License-Identifier: Apache-2.0
#include "airpad/dataset/templates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::dataset {

namespace {

const std::array<DigitTemplate, 10>& all_templates() {
  static const std::array<DigitTemplate, 10> templates = {{
      {0, {{0.50, 0.90}, {0.30, 0.80}, {0.20, 0.50}, {0.30, 0.20}, {0.50, 0.10},
           {0.70, 0.20}, {0.80, 0.50}, {0.70, 0.80}, {0.50, 0.90}, {0.40, 0.85}}},
      {1, {{0.50, 0.90}, {0.50, 0.63}, {0.50, 0.37}, {0.50, 0.10}}},
      {2, {{0.25, 0.72}, {0.35, 0.87}, {0.55, 0.90}, {0.72, 0.78}, {0.72, 0.60},
           {0.55, 0.42}, {0.35, 0.25}, {0.22, 0.10}, {0.50, 0.10}, {0.80, 0.10}}},
      {3, {{0.25, 0.82}, {0.45, 0.90}, {0.68, 0.85}, {0.72, 0.68}, {0.55, 0.55},
           {0.42, 0.52}, {0.55, 0.50}, {0.74, 0.38}, {0.72, 0.18}, {0.50, 0.10},
           {0.25, 0.17}}},
      // Closed-top four: up the stem, diagonal back down, then across.
      {4, {{0.65, 0.10}, {0.65, 0.50}, {0.65, 0.90}, {0.42, 0.62}, {0.20, 0.35},
           {0.50, 0.35}, {0.85, 0.35}}},
      {5, {{0.75, 0.90}, {0.50, 0.90}, {0.30, 0.90}, {0.27, 0.55}, {0.50, 0.60},
           {0.72, 0.48}, {0.72, 0.25}, {0.50, 0.10}, {0.25, 0.17}}},
      {6, {{0.70, 0.88}, {0.50, 0.90}, {0.30, 0.70}, {0.22, 0.40}, {0.30, 0.15},
           {0.50, 0.10}, {0.70, 0.20}, {0.72, 0.38}, {0.55, 0.50}, {0.35, 0.45},
           {0.24, 0.35}}},
      {7, {{0.20, 0.90}, {0.50, 0.90}, {0.80, 0.90}, {0.60, 0.50}, {0.45, 0.10}}},
      {8, {{0.72, 0.80}, {0.50, 0.90}, {0.28, 0.80}, {0.30, 0.62}, {0.50, 0.52},
           {0.72, 0.38}, {0.70, 0.17}, {0.50, 0.10}, {0.30, 0.17}, {0.28, 0.38},
           {0.50, 0.52}, {0.70, 0.62}, {0.72, 0.80}}},
      {9, {{0.72, 0.75}, {0.55, 0.90}, {0.33, 0.85}, {0.27, 0.68}, {0.40, 0.55},
           {0.60, 0.57}, {0.72, 0.72}, {0.72, 0.45}, {0.70, 0.10}}},
  }};
  return templates;
}

Point2 lerp(const Point2& a, const Point2& b, double ta, double tb, double t) {
  const double w = (tb - ta) > 0.0 ? (t - ta) / (tb - ta) : 0.0;
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

double knot_step(const Point2& a, const Point2& b) {
  const double d = std::hypot(b.x - a.x, b.y - a.y);
  return std::max(std::sqrt(d), 1e-6);
}

}  // namespace

const DigitTemplate& digit_template(int digit) {
  if (digit < 0 || digit > 9) {
    throw Error(ErrorCode::kInvalidArgument, "digit must be 0-9, got " + std::to_string(digit));
  }
  return all_templates()[static_cast<std::size_t>(digit)];
}

std::vector<Point2> catmull_rom(std::span<const Point2> control, int per_segment) {
  if (control.size() < 2) return {control.begin(), control.end()};
  std::vector<Point2> p;
  p.reserve(control.size() + 2);
  const Point2 first = control[0], second = control[1];
  const Point2 last = control[control.size() - 1], before = control[control.size() - 2];
  p.push_back({2 * first.x - second.x, 2 * first.y - second.y});
  p.insert(p.end(), control.begin(), control.end());
  p.push_back({2 * last.x - before.x, 2 * last.y - before.y});

  std::vector<Point2> out;
  out.reserve((control.size() - 1) * per_segment + 1);
  for (std::size_t i = 1; i + 2 < p.size(); ++i) {
    const Point2 &p0 = p[i - 1], &p1 = p[i], &p2 = p[i + 1], &p3 = p[i + 2];
    const double t0 = 0.0;
    const double t1 = t0 + knot_step(p0, p1);
    const double t2 = t1 + knot_step(p1, p2);
    const double t3 = t2 + knot_step(p2, p3);
    for (int k = 0; k < per_segment; ++k) {
      const double t = t1 + (t2 - t1) * k / per_segment;
      // Barry-Goldman pyramid.
      const Point2 a1 = lerp(p0, p1, t0, t1, t);
      const Point2 a2 = lerp(p1, p2, t1, t2, t);
      const Point2 a3 = lerp(p2, p3, t2, t3, t);
      const Point2 b1 = lerp(a1, a2, t0, t2, t);
      const Point2 b2 = lerp(a2, a3, t1, t3, t);
      out.push_back(lerp(b1, b2, t1, t2, t));
    }
  }
  out.push_back(control.back());
  return out;
}

double polyline_length(std::span<const Point2> points) {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    len += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return len;
}

std::vector<double> cumulative_arclength(std::span<const Point2> points) {
  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return cum;
}

Point2 point_at_arclength(std::span<const Point2> points, std::span<const double> cumulative,
                          double s) {
  if (points.empty()) throw Error(ErrorCode::kEmptyTrace, "empty path");
  const double total = cumulative.back();
  if (total <= 0.0 || points.size() == 1) return points.front();
  const double target = std::clamp(s, 0.0, 1.0) * total;
  auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.begin()) return points.front();
  if (it == cumulative.end()) return points.back();
  const std::size_t hi = static_cast<std::size_t>(it - cumulative.begin());
  return lerp(points[hi - 1], points[hi], cumulative[hi - 1], cumulative[hi], target);
}

}  // namespace airpad::dataset
