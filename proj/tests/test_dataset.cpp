// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "airpad/dataset/augment.hpp"
#include "airpad/dataset/dataset_io.hpp"
#include "airpad/dataset/synth.hpp"
#include "airpad/dataset/templates.hpp"
#include "airpad/gesture/capture.hpp"
#include "airpad/random.hpp"
#include "test_util.hpp"

using namespace airpad;
using namespace airpad::dataset;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("airpad_test_dataset_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double t = len2 > 0 ? std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(a.x + t * dx - p.x, a.y + t * dy - p.y);
}

double directed_hausdorff(const std::vector<Point2>& from, const std::vector<Point2>& to) {
  double worst = 0;
  for (const auto& p : from) {
    double best = INFINITY;
    for (std::size_t i = 1; i < to.size(); ++i) best = std::min(best, point_segment_distance(p, to[i - 1], to[i]));
    worst = std::max(worst, best);
  }
  return worst;
}

DigitImage random_image(std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  DigitImage img;
  for (auto& v : img.pixels) v = u(rng) < 0.2f ? u(rng) : 0.0f;
  img.label = static_cast<std::uint8_t>(rng() % 10);
  return img;
}

std::string content_key(const DigitImage& img) {
  const auto b = img.to_bytes();
  return std::string(b.begin(), b.end());
}

SynthConfig small(std::size_t per_class, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.per_class = per_class;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Templates, EveryDigitHasAConnectedStroke) {
  for (int d = 0; d <= 9; ++d) {
    const auto& t = digit_template(d);
    EXPECT_EQ(t.digit, d);
    EXPECT_GE(t.control_points.size(), 4u);
    for (const auto& p : t.control_points) {
      EXPECT_GE(p.x, 0.0);
      EXPECT_LE(p.x, 1.0);
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.y, 1.0);
    }
  }
  EXPECT_THROW(digit_template(10), Error);
  EXPECT_THROW(digit_template(-1), Error);
}

TEST(Templates, CatmullRomPassesThroughControlPoints) {
  const auto& t = digit_template(2);
  const auto curve = catmull_rom(t.control_points, 16);
  for (const auto& c : t.control_points) {
    double best = INFINITY;
    for (const auto& p : curve) best = std::min(best, std::hypot(p.x - c.x, p.y - c.y));
    EXPECT_LT(best, 1e-9);
  }
}

TEST(Templates, ArclengthEndpoints) {
  const std::vector<Point2> line{{0, 0}, {1, 0}, {1, 1}};
  const auto cum = cumulative_arclength(line);
  EXPECT_DOUBLE_EQ(polyline_length(line), 2.0);
  const auto mid = point_at_arclength(line, cum, 0.5);
  EXPECT_NEAR(mid.x, 1.0, 1e-12);
  EXPECT_NEAR(mid.y, 0.0, 1e-12);
  const auto q = point_at_arclength(line, cum, 0.75);
  EXPECT_NEAR(q.y, 0.5, 1e-12);
}

TEST(SynthTrajectory, IdenticalSeedIdenticalTrajectory) {
  SynthConfig cfg;
  cfg.jitter = 0.0;
  cfg.speed_variation = 0.0;
  for (int d = 0; d <= 9; ++d) {
    std::mt19937_64 r1(7), r2(7);
    const auto a = synth_trajectory(d, cfg, r1);
    const auto b = synth_trajectory(d, cfg, r2);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].t_s, b[i].t_s);
      EXPECT_EQ(a[i].x_cm, b[i].x_cm);
      EXPECT_EQ(a[i].y_cm, b[i].y_cm);
      EXPECT_EQ(a[i].z_cm, b[i].z_cm);
    }
  }
}

TEST(SynthTrajectory, CrossesFourCentimetresExactlyTwice) {
  const SynthConfig cfg;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto traj = synth_trajectory(trial % 10, cfg, rng);
    ASSERT_GE(traj.size(), 2u);
    EXPECT_GT(traj.front().z_cm, 4.0);
    EXPECT_GT(traj.back().z_cm, 4.0);
    int crossings = 0;
    for (std::size_t i = 1; i < traj.size(); ++i) crossings += (traj[i - 1].z_cm > 4.0) != (traj[i].z_cm > 4.0);
    EXPECT_EQ(crossings, 2);
    const double duration = traj.back().t_s - traj.front().t_s;
    EXPECT_GE(duration, 1.0);
    EXPECT_LE(duration, 2.0);
    for (std::size_t i = 1; i < traj.size(); ++i) EXPECT_NEAR(traj[i].t_s - traj[i - 1].t_s, 0.005, 1e-9);
  }
}

TEST(SynthTrajectory, DigitOneWithoutJitterIsCollinear) {
  SynthConfig cfg;
  cfg.jitter = 0.0;
  std::mt19937_64 rng(9);
  const auto detail = synth_trajectory_detail(1, cfg, rng);
  std::vector<Point2> drawn;
  for (const auto& s : detail.samples) {
    if (s.t_s >= detail.draw_begin_s && s.t_s <= detail.draw_end_s) drawn.push_back({s.x_cm, s.y_cm});
  }
  ASSERT_GE(drawn.size(), 3u);
  const Point2 a = drawn.front(), b = drawn.back();
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  ASSERT_GT(len, 1.0);
  for (const auto& p : drawn) {
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    EXPECT_LE(std::abs(cross) / len, 1e-6);
  }
}

TEST(SynthTrajectory, DrawnPathStaysNearTemplate) {
  const SynthConfig cfg;
  std::mt19937_64 rng(4);
  int within = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    const auto d = synth_trajectory_detail(trial % 10, cfg, rng);
    const double h = std::max(directed_hausdorff(d.drawn_path, d.template_path),
                              directed_hausdorff(d.template_path, d.drawn_path));
    within += h <= 3.0 * cfg.jitter * std::sqrt(2.0);
  }
  // 3 sigma per axis on a 2D displacement, across every control point of a digit
  EXPECT_GE(within, trials * 95 / 100);
}

TEST(SynthConfig, RejectsInvalid) {
  SynthConfig cfg;
  cfg.per_class = 0;
  EXPECT_AIRPAD_ERROR(cfg.validate(), ErrorCode::kConfigError);
  cfg = {};
  cfg.split_ratio = 1.0;
  EXPECT_AIRPAD_ERROR(cfg.validate(), ErrorCode::kConfigError);
  cfg = {};
  cfg.split_ratio = 0.0;
  EXPECT_AIRPAD_ERROR(cfg.validate(), ErrorCode::kConfigError);
  EXPECT_AIRPAD_ERROR(build_dataset(small(0, 1), {}), ErrorCode::kConfigError);
}

TEST(BuildDataset, TenPerClassSplitsEightTwo) {
  const auto result = build_dataset(small(10, 42), {});
  EXPECT_EQ(result.dataset.train.size(), 80u);
  EXPECT_EQ(result.dataset.test.size(), 20u);
  std::array<int, 10> train{}, test{};
  for (const auto& img : result.dataset.train) ++train.at(img.label.value());
  for (const auto& img : result.dataset.test) ++test.at(img.label.value());
  for (int d = 0; d < 10; ++d) {
    EXPECT_EQ(train[d], 8) << d;
    EXPECT_EQ(test[d], 2) << d;
  }
  EXPECT_LE(result.report.failures, result.report.trajectories / 100);
}

TEST(BuildDataset, OddRatioUsesFloorPerClass) {
  SynthConfig cfg = small(7, 5);
  cfg.split_ratio = 0.5;
  const auto ds = build_dataset(cfg, {}).dataset;
  std::array<int, 10> train{};
  for (const auto& img : ds.train) ++train.at(*img.label);
  for (int d = 0; d < 10; ++d) EXPECT_EQ(train[d], 3);
  EXPECT_EQ(ds.test.size(), 40u);
}

TEST(BuildDataset, ThreadCountDoesNotChangeOutput) {
  const auto a = build_dataset(small(4, 77), {}, 1).dataset;
  const auto b = build_dataset(small(4, 77), {}, 3).dataset;
  EXPECT_EQ(a, b);
  const auto c = build_dataset(small(4, 78), {}, 1).dataset;
  EXPECT_NE(a, c);
}

TEST(BuildDataset, NoLeakageBetweenSplits) {
  const auto ds = build_dataset(small(20, 8), {}).dataset;
  std::set<std::string> train;
  for (const auto& img : ds.train) train.insert(content_key(img));
  for (const auto& img : ds.test) EXPECT_EQ(train.count(content_key(img)), 0u);
}

TEST(BuildDataset, ImagesAreQuantizedAndInRange) {
  const auto ds = build_dataset(small(2, 9), {}).dataset;
  for (const auto& img : ds.train) {
    EXPECT_EQ(img.quantized(), img);
    EXPECT_GT(*std::max_element(img.pixels.begin(), img.pixels.end()), 0.5f);
  }
}

TEST(PipelineFidelity, NinetyNinePercentSegmentOnce) {
  const SynthConfig cfg;
  const sensing::SensorConfig sensor;
  int ok = 0;
  const int n = 300;
  for (int i = 0; i < n; ++i) ok += synth_image(i % 10, cfg, sensor, derive_seed(1234, {std::uint64_t(i)})).has_value();
  EXPECT_GE(ok, n * 99 / 100);
}

TEST(Augment, IdentityParamsReturnInput) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = random_image(rng);
    const auto out = apply_affine(img, {});
    EXPECT_EQ(out.label, img.label);
    for (std::size_t i = 0; i < gesture::kImagePixels; ++i) EXPECT_NEAR(out.pixels[i], img.pixels[i], 1e-6);
  }
}

TEST(Augment, HalfTurnMovesPixelToOppositeCorner) {
  for (std::size_t r = 2; r < 26; r += 5) {
    for (std::size_t c = 3; c < 26; c += 4) {
      DigitImage img;
      img.at(r, c) = 1.0f;
      const auto out = apply_affine(img, {180.0, 1.0, 0.0, 0.0});
      std::size_t br = 0, bc = 0;
      float best = -1;
      for (std::size_t i = 0; i < 28; ++i) {
        for (std::size_t j = 0; j < 28; ++j) {
          if (out.at(i, j) > best) best = out.at(i, j), br = i, bc = j;
        }
      }
      EXPECT_LE(std::abs(int(br) - int(27 - r)), 1);
      EXPECT_LE(std::abs(int(bc) - int(27 - c)), 1);
      EXPECT_GT(best, 0.5f);
    }
  }
}

TEST(Augment, ShiftMovesContent) {
  DigitImage img;
  img.at(10, 10) = 1.0f;
  // a tenth of 28 px is 2.8 px
  const auto out = apply_affine(img, {0.0, 1.0, 0.1, 0.0});
  EXPECT_NEAR(out.at(10, 12) + out.at(10, 13), 1.0f, 1e-5);
  const auto down = apply_affine(img, {0.0, 1.0, 0.0, 0.1});
  EXPECT_NEAR(down.at(12, 10) + down.at(13, 10), 1.0f, 1e-5);
}

TEST(Augment, OutputsInRangeLabelKeptMassBoundedByZoom) {
  const AugmentConfig cfg;
  std::mt19937_64 rng(2);
  const auto ds = build_dataset(small(2, 10), {}).dataset;
  for (int trial = 0; trial < 200; ++trial) {
    const auto& img = ds.train[trial % ds.train.size()];
    const auto p = sample_affine(cfg, rng);
    EXPECT_GE(p.rotation_deg, 0.0);
    EXPECT_LE(p.rotation_deg, 180.0);
    EXPECT_GE(p.zoom, 0.9);
    EXPECT_LE(p.zoom, 1.1);
    EXPECT_LE(std::abs(p.shift_x), 0.1);
    EXPECT_LE(std::abs(p.shift_y), 0.1);
    const auto out = apply_affine(img, p);
    EXPECT_EQ(out.label, img.label);
    double in_sum = 0, out_sum = 0;
    for (float v : img.pixels) in_sum += v;
    for (float v : out.pixels) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
      out_sum += v;
    }
    // bilinear resampling smears a little mass; content can only leave the frame
    EXPECT_LE(out_sum, p.zoom * p.zoom * in_sum * 1.05 + 1.0);
  }
}

TEST(Augment, AugmentAllIsDeterministicPerIndex) {
  std::mt19937_64 rng(3);
  std::vector<DigitImage> imgs;
  for (int i = 0; i < 6; ++i) imgs.push_back(random_image(rng));
  AugmentConfig cfg;
  cfg.seed = 99;
  const auto a = augment_all(imgs, cfg);
  const auto b = augment_all(imgs, cfg);
  EXPECT_EQ(a, b);
  const auto head = augment_all(std::span(imgs).first(3), cfg);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(head[i], a[i]);
  cfg.seed = 100;
  EXPECT_NE(augment_all(imgs, cfg), a);
}

TEST(AugmentConfig, RejectsInvalid) {
  AugmentConfig cfg;
  cfg.rotation_max_deg = 400;
  EXPECT_AIRPAD_ERROR(cfg.validate(), ErrorCode::kConfigError);
  cfg = {};
  cfg.zoom_min = 0.0;
  EXPECT_AIRPAD_ERROR(cfg.validate(), ErrorCode::kConfigError);
}

TEST(DatasetIo, SplitRoundTripIsByteIdentical) {
  std::mt19937_64 rng(4);
  std::vector<DigitImage> imgs;
  for (int i = 0; i < 12; ++i) imgs.push_back(random_image(rng).quantized());
  const auto bytes = encode_split(imgs);
  EXPECT_EQ(bytes.size(), 14u + 12u * 785u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "APDS");
  const auto back = decode_split(bytes);
  EXPECT_EQ(back, imgs);
  EXPECT_EQ(encode_split(back), bytes);
}

TEST(DatasetIo, EmptySplitIsValid) {
  const auto bytes = encode_split({});
  EXPECT_EQ(bytes.size(), 14u);
  EXPECT_TRUE(decode_split(bytes).empty());
}

TEST(DatasetIo, CorruptFilesAreFormatErrors) {
  std::mt19937_64 rng(5);
  std::vector<DigitImage> imgs{random_image(rng), random_image(rng)};
  const auto bytes = encode_split(imgs);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_AIRPAD_ERROR(decode_split(truncated), ErrorCode::kFormatError);
  auto extra = bytes;
  extra.push_back(0);
  EXPECT_AIRPAD_ERROR(decode_split(extra), ErrorCode::kFormatError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_AIRPAD_ERROR(decode_split(magic), ErrorCode::kFormatError);
  auto version = bytes;
  version[4] = 2;
  EXPECT_AIRPAD_ERROR(decode_split(version), ErrorCode::kFormatError);
  auto label = bytes;
  label[14] = 10;
  EXPECT_AIRPAD_ERROR(decode_split(label), ErrorCode::kFormatError);
  EXPECT_AIRPAD_ERROR(decode_split(std::vector<std::uint8_t>(5)), ErrorCode::kFormatError);
}

TEST(DatasetIo, SaveLoadDirectoryAndSameSeedSameFiles) {
  const auto dir_a = scratch_dir("a"), dir_b = scratch_dir("b");
  const SynthConfig cfg = small(3, 31);
  const auto ds = build_dataset(cfg, {}).dataset;
  save_dataset(dir_a, ds, {cfg.seed, cfg.per_class});
  save_dataset(dir_b, build_dataset(cfg, {}).dataset, {cfg.seed, cfg.per_class});
  EXPECT_EQ(load_dataset(dir_a), ds);
  for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
    const auto other = dir_b / entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(other)) << other;
    EXPECT_EQ(read_bytes(entry.path()), read_bytes(other)) << entry.path();
  }
  EXPECT_AIRPAD_ERROR(load_dataset(dir_a / "missing"), ErrorCode::kFormatError);
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}
