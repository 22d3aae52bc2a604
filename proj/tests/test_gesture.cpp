// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "airpad/gesture/capture.hpp"
#include "airpad/gesture/coordinate.hpp"
#include "airpad/gesture/raster.hpp"
#include "airpad/gesture/segmenter.hpp"
#include "test_util.hpp"

using namespace airpad;
using namespace airpad::gesture;
using sensing::ChannelFrame;

namespace {

ChannelFrame frame(double a, double b, double c, double d, double t = 0.0) {
  ChannelFrame f;
  f.t_s = t;
  f.values = {a, b, c, d};
  return f;
}

// z profile sampled at 80 Hz: `lead` idle frames, `dip` frames at high proximity, then idle.
std::vector<Coordinate> dip_profile(std::size_t lead, std::size_t dip, std::size_t tail) {
  std::vector<Coordinate> out;
  const double on = SegmenterConfig{}.z_on;
  std::size_t i = 0;
  for (; i < lead; ++i) out.push_back({0, 0, 0.02, i / 80.0});
  for (std::size_t k = 0; k < dip; ++k, ++i) out.push_back({0.01 * k, 0.0, on * 1.3, i / 80.0});
  for (std::size_t k = 0; k < tail; ++k, ++i) out.push_back({0, 0, 0.02, i / 80.0});
  return out;
}

std::vector<SegmentEvent> run(Segmenter& seg, const std::vector<Coordinate>& coords) {
  std::vector<SegmentEvent> events;
  for (const auto& c : coords) events.push_back(seg.step(c));
  return events;
}

std::size_t count(const std::vector<SegmentEvent>& events, SegmentEventKind kind) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.kind == kind;
  return n;
}

std::vector<Point2> random_trace(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<Point2> pts;
  Point2 p{u(rng), u(rng)};
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(p);
    p.x += 0.25 * u(rng);
    p.y += 0.25 * u(rng);
  }
  return pts;
}

}  // namespace

TEST(Reconstruct, WorkedExample) {
  const auto c = reconstruct(frame(0.5, 0.4, 0.1, 0.2, 1.5));
  EXPECT_NEAR(c.x_u, 0.3, 1e-15);
  EXPECT_NEAR(c.y_u, 0.3, 1e-15);
  EXPECT_NEAR(c.z_u, 0.3, 1e-15);
  EXPECT_EQ(c.t_s, 1.5);
}

TEST(Reconstruct, SymmetricAndIdleFrames) {
  const auto s = reconstruct(frame(0.3, 0.7, 0.7, 0.3));
  EXPECT_EQ(s.x_u, 0.0);
  EXPECT_EQ(s.y_u, 0.0);
  EXPECT_EQ(reconstruct(frame(0, 0, 0, 0)), (Coordinate{0, 0, 0, 0}));
}

TEST(Reconstruct, IsLinear) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = frame(u(rng), u(rng), u(rng), u(rng));
    const auto g = frame(u(rng), u(rng), u(rng), u(rng));
    const double alpha = 4 * u(rng) - 2, beta = 4 * u(rng) - 2;
    ChannelFrame h;
    for (int k = 0; k < 4; ++k) h.values[k] = alpha * f.values[k] + beta * g.values[k];
    const auto cf = reconstruct(f), cg = reconstruct(g), ch = reconstruct(h);
    EXPECT_NEAR(ch.x_u, alpha * cf.x_u + beta * cg.x_u, 1e-12);
    EXPECT_NEAR(ch.y_u, alpha * cf.y_u + beta * cg.y_u, 1e-12);
    EXPECT_NEAR(ch.z_u, alpha * cf.z_u + beta * cg.z_u, 1e-12);
  }
}

TEST(Reconstruct, ChannelSwapsNegateOneAxis) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = frame(u(rng), u(rng), u(rng), u(rng));
    const auto c = reconstruct(f);
    const auto ad = reconstruct(frame(f.d(), f.b(), f.c(), f.a()));
    const auto bc = reconstruct(frame(f.a(), f.c(), f.b(), f.d()));
    EXPECT_EQ(ad.x_u, -c.x_u);
    EXPECT_EQ(ad.y_u, c.y_u);
    EXPECT_DOUBLE_EQ(ad.z_u, c.z_u);
    EXPECT_EQ(bc.y_u, -c.y_u);
    EXPECT_EQ(bc.x_u, c.x_u);
    EXPECT_DOUBLE_EQ(bc.z_u, c.z_u);
  }
}

TEST(EstimateDistance, InvertsResponseLaw) {
  EXPECT_EQ(estimate_distance(1.0), 0.0);
  EXPECT_NEAR(estimate_distance(std::exp(-1.25)), 5.0, 1e-12);
  EXPECT_NEAR(estimate_distance(std::exp(-1.0)), 4.0, 1e-12);
  double prev = estimate_distance(1e-6);
  for (double z = 1e-3; z <= 1.0; z += 1e-3) {
    const double d = estimate_distance(z);
    EXPECT_LT(d, prev);
    EXPECT_GE(d, 0.0);
    prev = d;
  }
}

TEST(EstimateDistance, RejectsNonPositive) {
  EXPECT_AIRPAD_ERROR(estimate_distance(0.0), ErrorCode::kNonPositiveProximity);
  EXPECT_AIRPAD_ERROR(estimate_distance(-0.5), ErrorCode::kNonPositiveProximity);
}

TEST(Segmenter, DefaultThresholds) {
  const SegmenterConfig cfg;
  EXPECT_NEAR(cfg.z_on, 0.2865047968601901, 1e-15);
  EXPECT_NEAR(cfg.z_off, 0.9 * 0.2865047968601901, 1e-15);
  EXPECT_EQ(cfg.min_points, 8u);
  SegmenterConfig bad = cfg;
  bad.z_off = bad.z_on;
  EXPECT_AIRPAD_ERROR(bad.validate(), ErrorCode::kConfigError);
  bad = cfg;
  bad.min_points = 0;
  EXPECT_AIRPAD_ERROR(bad.validate(), ErrorCode::kConfigError);
}

TEST(Segmenter, LongDipGivesOneCompletedGesture) {
  Segmenter seg;
  const auto events = run(seg, dip_profile(20, 40, 20));
  EXPECT_EQ(count(events, SegmentEventKind::kStarted), 1u);
  EXPECT_EQ(count(events, SegmentEventKind::kPoint), 39u);
  EXPECT_EQ(count(events, SegmentEventKind::kCompleted), 1u);
  EXPECT_EQ(count(events, SegmentEventKind::kDiscarded), 0u);
  for (const auto& e : events) {
    if (e.kind != SegmentEventKind::kCompleted) continue;
    ASSERT_TRUE(e.trace.has_value());
    EXPECT_EQ(e.trace->points.size(), 40u);
    EXPECT_DOUBLE_EQ(e.trace->start_t, 20 / 80.0);
    EXPECT_DOUBLE_EQ(e.trace->end_t, 59 / 80.0);
  }
  EXPECT_EQ(seg.mode(), Segmenter::Mode::kIdle);
}

TEST(Segmenter, ShortDipIsDiscarded) {
  Segmenter seg;
  const auto events = run(seg, dip_profile(5, 3, 5));
  EXPECT_EQ(count(events, SegmentEventKind::kStarted), 1u);
  EXPECT_EQ(count(events, SegmentEventKind::kCompleted), 0u);
  ASSERT_EQ(count(events, SegmentEventKind::kDiscarded), 1u);
  for (const auto& e : events) {
    if (e.kind == SegmentEventKind::kDiscarded) EXPECT_EQ(e.discarded_points, 3u);
  }
}

TEST(Segmenter, ExactlyMinPointsCompletes) {
  Segmenter seg;
  const auto events = run(seg, dip_profile(2, 8, 2));
  EXPECT_EQ(count(events, SegmentEventKind::kCompleted), 1u);
}

TEST(Segmenter, HandNeverApproachingStaysIdle) {
  Segmenter seg;
  const auto events = run(seg, dip_profile(100, 0, 0));
  EXPECT_EQ(count(events, SegmentEventKind::kIdle), 100u);
}

TEST(Segmenter, HysteresisIgnoresDipBetweenThresholds) {
  const SegmenterConfig cfg;
  Segmenter seg(cfg);
  std::vector<Coordinate> coords;
  double t = 0;
  for (int i = 0; i < 10; ++i) coords.push_back({0, 0, cfg.z_on * 1.1, t += 0.0125});
  // between z_off and z_on: still drawing
  for (int i = 0; i < 10; ++i) coords.push_back({0, 0, 0.5 * (cfg.z_on + cfg.z_off), t += 0.0125});
  coords.push_back({0, 0, cfg.z_off * 0.99, t += 0.0125});
  const auto events = run(seg, coords);
  EXPECT_EQ(count(events, SegmentEventKind::kStarted), 1u);
  ASSERT_EQ(count(events, SegmentEventKind::kCompleted), 1u);
  EXPECT_EQ(events.back().trace->points.size(), 20u);
}

TEST(Segmenter, OutOfOrderTimestampThrows) {
  Segmenter seg;
  seg.step({0, 0, 0, 1.0});
  EXPECT_AIRPAD_ERROR(seg.step({0, 0, 0, 1.0}), ErrorCode::kOutOfOrderTimestamp);
  EXPECT_AIRPAD_ERROR(seg.step({0, 0, 0, 0.5}), ErrorCode::kOutOfOrderTimestamp);
  seg.reset();
  EXPECT_NO_THROW(seg.step({0, 0, 0, 0.5}));
}

TEST(Segmenter, ResetDropsPartialGesture) {
  Segmenter seg;
  const auto coords = dip_profile(0, 6, 0);
  run(seg, coords);
  EXPECT_EQ(seg.mode(), Segmenter::Mode::kActive);
  EXPECT_EQ(seg.current_points().size(), 6u);
  seg.reset();
  EXPECT_EQ(seg.mode(), Segmenter::Mode::kIdle);
  EXPECT_TRUE(seg.current_points().empty());
}

TEST(Segmenter, StartedAlwaysPairsWithOneTerminalEvent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    Segmenter seg;
    bool open = false;
    std::size_t started = 0, terminal = 0;
    for (int i = 0; i < 2000; ++i) {
      const auto e = seg.step({0, 0, u(rng), i * 0.0125});
      if (e.kind == SegmentEventKind::kStarted) {
        EXPECT_FALSE(open);
        open = true;
        ++started;
      } else if (e.kind == SegmentEventKind::kCompleted || e.kind == SegmentEventKind::kDiscarded) {
        EXPECT_TRUE(open);
        open = false;
        ++terminal;
      } else if (e.kind == SegmentEventKind::kPoint) {
        EXPECT_TRUE(open);
      }
    }
    EXPECT_EQ(started, terminal + (open ? 1 : 0));
  }
}

TEST(Normalize, CentersAndScalesBoundingBox) {
  std::mt19937_64 rng(21);
  const double lo = 4.0 / 28.0, hi = 24.0 / 28.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = normalize_trace(random_trace(rng, 30));
    double x0 = 1, x1 = 0, y0 = 1, y1 = 0;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
    }
    EXPECT_GE(x0, lo - 1e-12);
    EXPECT_LE(x1, hi + 1e-12);
    EXPECT_GE(y0, lo - 1e-12);
    EXPECT_LE(y1, hi + 1e-12);
    EXPECT_NEAR(std::max(x1 - x0, y1 - y0), 20.0 / 28.0, 1e-12);
    EXPECT_NEAR(0.5 * (x0 + x1), 0.5, 1e-12);
    EXPECT_NEAR(0.5 * (y0 + y1), 0.5, 1e-12);
  }
}

TEST(Normalize, NormalizedTraceIsFixedPoint) {
  std::mt19937_64 rng(22);
  const auto once = normalize_trace(random_trace(rng, 25));
  const auto twice = normalize_trace(once);
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_NEAR(once[i].x, twice[i].x, 1e-12);
    EXPECT_NEAR(once[i].y, twice[i].y, 1e-12);
  }
}

TEST(Normalize, DegenerateTraceCollapsesToCenter) {
  const std::vector<Point2> same(5, Point2{0.3, -0.2});
  for (const auto& p : normalize_trace(same)) {
    EXPECT_EQ(p.x, 0.5);
    EXPECT_EQ(p.y, 0.5);
  }
  EXPECT_AIRPAD_ERROR(normalize_trace(std::vector<Point2>{}), ErrorCode::kEmptyTrace);
}

TEST(Rasterize, VerticalCenterStrokeOccupiesColumnsTwelveToFifteen) {
  const std::vector<Point2> stroke{{0.5, 4.0 / 28.0}, {0.5, 24.0 / 28.0}};
  const auto img = rasterize(stroke);
  double weighted = 0, total = 0;
  for (std::size_t r = 0; r < kImageSide; ++r) {
    for (std::size_t c = 0; c < kImageSide; ++c) {
      const float v = img.at(r, c);
      if (c < 12 || c > 15) EXPECT_EQ(v, 0.0f) << r << "," << c;
      weighted += v * c;
      total += v;
    }
  }
  EXPECT_NEAR(weighted / total, 13.5, 1.0);
  // middle row is fully covered in 13 and 14
  EXPECT_EQ(img.at(14, 13), 1.0f);
  EXPECT_EQ(img.at(14, 14), 1.0f);
}

TEST(Rasterize, TopOfUnitSquareIsRowZero) {
  const std::vector<Point2> dot{{0.5, 0.95}};
  const auto img = rasterize(dot);
  float top = 0, bottom = 0;
  for (std::size_t c = 0; c < kImageSide; ++c) {
    top += img.at(1, c);
    bottom += img.at(26, c);
  }
  EXPECT_GT(top, 0.0f);
  EXPECT_EQ(bottom, 0.0f);
}

TEST(Rasterize, EmptyPolylineThrows) {
  EXPECT_AIRPAD_ERROR(rasterize(std::vector<Point2>{}), ErrorCode::kEmptyTrace);
}

TEST(Rasterize, PixelsInUnitRangeWithAStrongPixel) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto img = rasterize(normalize_trace(random_trace(rng, 1 + trial % 40)));
    float mx = 0;
    for (float v : img.pixels) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
      mx = std::max(mx, v);
    }
    EXPECT_GT(mx, 0.5f);
  }
}

TEST(Rasterize, InvariantUnderScaleAndTranslation) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> s(0.2, 5.0), d(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_trace(rng, 30);
    const double k = s(rng), dx = d(rng), dy = d(rng);
    std::vector<Point2> moved;
    for (const auto& p : pts) moved.push_back({k * p.x + dx, k * p.y + dy});
    const auto a = rasterize(normalize_trace(pts));
    const auto b = rasterize(normalize_trace(moved));
    for (std::size_t i = 0; i < kImagePixels; ++i) EXPECT_LE(std::abs(a.pixels[i] - b.pixels[i]), 0.02f);
  }
}

TEST(Rasterize, Deterministic) {
  std::mt19937_64 rng(51);
  const auto pts = normalize_trace(random_trace(rng, 20));
  EXPECT_EQ(rasterize(pts), rasterize(pts));
}

TEST(DigitImage, ByteRoundTrip) {
  std::vector<std::uint8_t> bytes(kImagePixels);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i * 7);
  const auto img = DigitImage::from_bytes(bytes, 4);
  EXPECT_EQ(img.label, 4);
  const auto back = img.to_bytes();
  EXPECT_TRUE(std::equal(back.begin(), back.end(), bytes.begin()));
  EXPECT_EQ(img.quantized(), img);
}

TEST(DigitImage, WrongByteCountThrows) {
  const std::vector<std::uint8_t> short_payload(783);
  EXPECT_AIRPAD_ERROR(DigitImage::from_bytes(short_payload), ErrorCode::kPayloadSizeMismatch);
  const std::vector<std::uint8_t> long_payload(785);
  EXPECT_AIRPAD_ERROR(DigitImage::from_bytes(long_payload), ErrorCode::kPayloadSizeMismatch);
}

TEST(Capture, ApproachDrawRetractYieldsOneGesture) {
  std::vector<sensing::HandSample> traj;
  double t = 0;
  const auto add = [&](double x, double y, double z) { traj.push_back({t, x, y, z}), t += 0.005; };
  for (int i = 0; i < 60; ++i) add(0, 1.5, 9.0 - 6.5 * i / 59.0);
  for (int i = 0; i < 160; ++i) add(0, 1.5 - 3.0 * i / 159.0, 2.5);
  for (int i = 0; i < 60; ++i) add(0, -1.5, 2.5 + 6.5 * i / 59.0);
  const auto result = capture(traj, sensing::ElectrodeLayout::standard(), {});
  ASSERT_EQ(result.gestures.size(), 1u);
  EXPECT_EQ(result.started, 1u);
  EXPECT_EQ(result.discarded, 0u);
  const auto& g = result.gestures[0];
  EXPECT_GT(g.points.front().y_u, g.points.back().y_u);
  const auto img = render_gesture(g);
  EXPECT_EQ(img, render_gesture(capture(traj, sensing::ElectrodeLayout::standard(), {}).gestures[0]));
}
