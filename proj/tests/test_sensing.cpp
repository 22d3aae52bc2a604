// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "airpad/gesture/coordinate.hpp"
#include "airpad/sensing/io.hpp"
#include "airpad/sensing/simulator.hpp"
#include "test_util.hpp"

namespace airpad::sensing {
namespace {

std::vector<HandSample> hold(double seconds, double x, double y, double z, double rate = 200.0) {
  std::vector<HandSample> out;
  const int n = static_cast<int>(std::round(seconds * rate));
  for (int i = 0; i <= n; ++i) out.push_back({i / rate, x, y, z});
  return out;
}

SensorConfig quiet() {
  SensorConfig cfg;
  cfg.noise_sigma = 0.0;
  return cfg;
}

TEST(ChannelResponse, CenterAxisAtFourCentimetres) {
  // r = 5 for every pad: exp(-5/4)
  const auto s = channel_response(Vec3{0, 0, 4}, ElectrodeLayout::standard(), 4.0);
  for (double v : s) EXPECT_NEAR(v, 0.2865047968601901, 1e-15);
}

TEST(ChannelResponse, VanishesFarAway) {
  const auto s = channel_response(Vec3{0, 0, 1e4}, ElectrodeLayout::standard(), 4.0);
  for (double v : s) EXPECT_LT(v, 1e-100);
}

TEST(ChannelResponse, MirrorSwapsPadsExactly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6, 6), z(0, 10);
  const auto layout = ElectrodeLayout::standard();
  for (int i = 0; i < 500; ++i) {
    const Vec3 p{u(rng), u(rng), z(rng)};
    const auto s = channel_response(p, layout, 4.0);
    const auto sx = channel_response(Vec3{-p.x, p.y, p.z}, layout, 4.0);
    const auto sy = channel_response(Vec3{p.x, -p.y, p.z}, layout, 4.0);
    EXPECT_EQ(s[0], sx[3]);
    EXPECT_EQ(s[3], sx[0]);
    EXPECT_EQ(s[1], sx[1]);
    EXPECT_EQ(s[1], sy[2]);
    EXPECT_EQ(s[2], sy[1]);
    EXPECT_EQ(s[0], sy[0]);
  }
}

TEST(ChannelResponse, OnAxisPairsEqual) {
  for (double z : {0.5, 2.5, 4.0, 8.0}) {
    const auto s = channel_response(Vec3{0, 0, z}, ElectrodeLayout::standard(), 4.0);
    EXPECT_EQ(s[0], s[3]);
    EXPECT_EQ(s[1], s[2]);
  }
}

TEST(ChannelResponse, StrictlyDecreasingWithDistance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5), step(0.01, 2.0);
  const auto layout = ElectrodeLayout::standard();
  for (int i = 0; i < 300; ++i) {
    const Vec3 p{u(rng), u(rng), std::abs(u(rng))};
    for (std::size_t e = 0; e < kNumPads; ++e) {
      const Vec3& pad = layout.pads[e];
      const double k = 1.0 + step(rng) / std::max(distance(p, pad), 1e-3);
      // Move away from the pad along the pad->hand ray.
      const Vec3 q{pad.x + k * (p.x - pad.x), pad.y + k * (p.y - pad.y), pad.z + k * (p.z - pad.z)};
      if (distance(p, pad) < 1e-6) continue;
      EXPECT_LT(channel_response(q, layout, 4.0)[e], channel_response(p, layout, 4.0)[e]);
    }
  }
}

TEST(ElectrodeLayout, StandardIsValidAndBrokenMirrorIsNot) {
  EXPECT_NO_THROW(ElectrodeLayout::standard().validate());
  auto bad = ElectrodeLayout::standard();
  bad.pads[3].x = -2.5;
  EXPECT_AIRPAD_ERROR(bad.validate(), ErrorCode::kConfigError);
  auto raised = ElectrodeLayout::standard();
  raised.pads[1].z = 0.1;
  EXPECT_AIRPAD_ERROR(raised.validate(), ErrorCode::kConfigError);
}

TEST(SensorConfig, RejectsInvalid) {
  SensorConfig c;
  c.internal_rate_hz = 2010;  // not a multiple of 80
  EXPECT_AIRPAD_ERROR(c.validate(), ErrorCode::kConfigError);
  c = {};
  c.filter_cutoff_hz = c.internal_rate_hz / 2.0;
  EXPECT_AIRPAD_ERROR(c.validate(), ErrorCode::kConfigError);
  c = {};
  c.adc_bits = 17;
  EXPECT_AIRPAD_ERROR(c.validate(), ErrorCode::kConfigError);
  c.adc_bits = 0;
  EXPECT_AIRPAD_ERROR(c.validate(), ErrorCode::kConfigError);
}

TEST(Lowpass, DcGainIsExactlyOne) {
  for (double u : {0.5, 0.0, 1.0, 0.123456789}) {
    OnePoleLowpass f(72.3, 20000);
    for (int i = 0; i < 10000; ++i) ASSERT_EQ(f.step(u), u);
  }
}

TEST(Lowpass, StepResponseAtTwoKilohertz) {
  OnePoleLowpass f(72.3, 2000);
  EXPECT_NEAR(f.alpha(), 0.2031885069876912, 1e-15);
  f.step(0.0);
  std::vector<double> y;
  for (int k = 0; k < 5; ++k) y.push_back(f.step(1.0));
  EXPECT_NEAR(y[0], 0.2031885069876912, 1e-12);
  EXPECT_NEAR(y[3], 0.5968911262843236, 1e-12);
  EXPECT_NEAR(y[4], 0.6787982164881017, 1e-12);
  // 1 - 1/e is crossed between steps 4 and 5.
  EXPECT_LT(y[3], 1 - std::exp(-1.0));
  EXPECT_GT(y[4], 1 - std::exp(-1.0));
  const double tau = -1.0 / (2000 * std::log(1 - f.alpha()));
  EXPECT_NEAR(tau, 1.0 / (2 * std::numbers::pi * 72.3), 0.02 / (2 * std::numbers::pi * 72.3));
}

// Steady-state gain of the default chain filter for a sinusoid, by projecting
// the output onto sin/cos over whole periods after the transient.
double measured_gain_db(double freq_hz, double fs) {
  OnePoleLowpass f(72.3, fs);
  const double w = 2 * std::numbers::pi * freq_hz / fs;
  const int settle = static_cast<int>(fs);
  const int n = static_cast<int>(fs);  // 1 s of whole periods for 723 Hz
  double s = 0, c = 0;
  f.step(0.0);
  for (int i = 1; i <= settle + n; ++i) {
    const double y = f.step(std::sin(w * i));
    if (i > settle) {
      s += y * std::sin(w * i);
      c += y * std::cos(w * i);
    }
  }
  return 20 * std::log10(2.0 * std::hypot(s, c) / n);
}

TEST(Lowpass, AttenuationAtTenTimesCutoffDefaultChain) {
  const double db = measured_gain_db(723.0, SensorConfig{}.internal_rate_hz);
  EXPECT_NEAR(db, -20.04, 0.5);
  // Discrete transfer function of the same recursion.
  EXPECT_NEAR(db, -20.02453467803802, 0.01);
}

TEST(Simulator, FrameCountIsFloorOfDurationTimesScanRate) {
  for (double seconds : {0.5, 1.0, 1.37, 2.0}) {
    SensorSimulator sim(ElectrodeLayout::standard(), {});
    const auto frames = sim.run(Trajectory(hold(seconds, 0, 0, 6)));
    EXPECT_EQ(frames.size(), static_cast<std::size_t>(std::floor(seconds * 80 + 1e-9))) << seconds;
  }
}

TEST(Simulator, FramesStampedAtCycleEnds) {
  SensorSimulator sim(ElectrodeLayout::standard(), {});
  const auto frames = sim.run(Trajectory(hold(1.0, 0, 0, 6)));
  ASSERT_EQ(frames.size(), 80u);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    EXPECT_NEAR(frames[i].t_s, (i + 1) / 80.0, 1e-12);
  }
}

TEST(Simulator, IdenticalSeedsGiveIdenticalStreams) {
  SensorConfig cfg;
  cfg.seed = 99;
  const auto traj = hold(1.0, 1.0, -0.5, 3.0);
  SensorSimulator a(ElectrodeLayout::standard(), cfg), b(ElectrodeLayout::standard(), cfg);
  a.calibrate();
  b.calibrate();
  EXPECT_EQ(a.run(Trajectory(traj)), b.run(Trajectory(traj)));
  cfg.seed = 100;
  SensorSimulator c(ElectrodeLayout::standard(), cfg);
  c.calibrate();
  EXPECT_NE(a.calibration()->baseline, c.calibration()->baseline);
}

TEST(Simulator, StaticHandWithoutNoiseSettles) {
  SensorSimulator sim(ElectrodeLayout::standard(), quiet());
  const auto frames = sim.run(Trajectory(hold(1.0, 0.7, 0.3, 3.0)));
  for (std::size_t i = 10; i < frames.size(); ++i) {
    EXPECT_EQ(frames[i].values, frames[9].values);
  }
}

TEST(Simulator, ValuesLieOnTheAdcGrid) {
  SensorSimulator sim(ElectrodeLayout::standard(), quiet());
  std::vector<HandSample> traj;
  for (int i = 0; i <= 200; ++i) traj.push_back({i / 200.0, std::sin(i * 0.05), std::cos(i * 0.03), 2 + i * 0.02});
  for (const auto& f : sim.run(Trajectory(traj))) {
    for (double v : f.values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_NEAR(v * 1023, std::round(v * 1023), 1e-9);
    }
  }
}

TEST(Simulator, GapInTrajectoryThrows) {
  SensorSimulator sim(ElectrodeLayout::standard(), {});
  Trajectory traj(hold(0.01, 0, 0, 5));  // shorter than one cycle
  EXPECT_AIRPAD_ERROR(sim.scan_cycle(traj), ErrorCode::kTrajectoryGap);
}

TEST(Simulator, StreamingFeedMatchesBatchRun) {
  SensorConfig cfg;
  cfg.seed = 4;
  std::vector<HandSample> traj;
  for (int i = 0; i <= 300; ++i) traj.push_back({0.3 + i / 200.0, std::sin(i * 0.04) * 2, 1.0, 2.0 + std::cos(i * 0.05)});
  SensorSimulator batch(ElectrodeLayout::standard(), cfg), stream(ElectrodeLayout::standard(), cfg);
  batch.calibrate();
  stream.calibrate();
  const auto expected = batch.run(Trajectory(traj));
  std::vector<ChannelFrame> got;
  for (const auto& s : traj) {
    for (auto& f : stream.feed(s)) got.push_back(f);
  }
  EXPECT_EQ(got, expected);
}

TEST(Calibration, ConstantIdleFramesGiveZeroOutput) {
  std::vector<ChannelFrame> idle(40, ChannelFrame{0.0, {0.25, 0.25, 0.25, 0.25}});
  const auto state = calibrate(idle);
  for (double b : state.baseline) EXPECT_DOUBLE_EQ(b, 0.25);
  EXPECT_EQ(state.frames_accumulated, 40u);
  const auto out = state.apply(ChannelFrame{1.0, {0.25, 0.25, 0.25, 0.25}});
  for (double v : out.values) EXPECT_EQ(v, 0.0);
  // below baseline clamps to 0
  EXPECT_EQ(state.apply(ChannelFrame{1.0, {0.1, 0.2, 0.3, 0.4}}).values[0], 0.0);
}

TEST(Calibration, TooFewFramesThrows) {
  std::vector<ChannelFrame> idle(10);
  EXPECT_AIRPAD_ERROR(calibrate(idle), ErrorCode::kInsufficientIdleFrames);
}

TEST(Calibration, BaselineWithinStandardErrorOfIdleLevel) {
  const SensorConfig cfg;  // sigma 0.003
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SensorConfig c = cfg;
    c.seed = seed;
    SensorSimulator sim(ElectrodeLayout::standard(), c);
    const auto& state = sim.calibrate();
    bool ok = true;
    for (double b : state.baseline) ok = ok && std::abs(b - cfg.idle_offset) <= 3 * 0.003 / std::sqrt(40.0);
    within += ok;
  }
  EXPECT_GE(within, 99);
}

TEST(Calibration, IdleFramesAfterCalibrationStayWithinThreeSigma) {
  SensorSimulator sim(ElectrodeLayout::standard(), {});
  sim.calibrate();
  for (const auto& f : sim.idle_frames(400)) {
    for (double v : f.values) EXPECT_LE(std::abs(v), 3 * 0.003);
  }
}

TEST(SensingSymmetry, CentralAxisGivesZeroXY) {
  std::vector<HandSample> traj;
  for (int i = 0; i <= 300; ++i) traj.push_back({i / 200.0, 0.0, 0.0, 1.0 + 6.0 * std::abs(std::sin(i * 0.02))});
  SensorSimulator sim(ElectrodeLayout::standard(), quiet());
  sim.calibrate();
  const auto frames = sim.run(Trajectory(traj));
  ASSERT_FALSE(frames.empty());
  for (const auto& f : frames) {
    const auto c = gesture::reconstruct(f);
    EXPECT_EQ(c.x_u, 0.0);
    EXPECT_EQ(c.y_u, 0.0);
  }
}

TEST(SensingSymmetry, MirroredTrajectorySwapsChannels) {
  std::vector<HandSample> traj, mx, my;
  for (int i = 0; i <= 300; ++i) {
    const HandSample s{i / 200.0, 2.5 * std::sin(i * 0.03), 1.5 * std::cos(i * 0.05), 2.0 + (i % 50) * 0.05};
    traj.push_back(s);
    mx.push_back({s.t_s, -s.x_cm, s.y_cm, s.z_cm});
    my.push_back({s.t_s, s.x_cm, -s.y_cm, s.z_cm});
  }
  auto run = [](const std::vector<HandSample>& t) {
    SensorSimulator sim(ElectrodeLayout::standard(), quiet());
    sim.calibrate();
    return sim.run(Trajectory(t));
  };
  const auto f = run(traj), fx = run(mx), fy = run(my);
  ASSERT_EQ(f.size(), fx.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f[i].a(), fx[i].d());
    EXPECT_EQ(f[i].d(), fx[i].a());
    EXPECT_EQ(f[i].b(), fx[i].b());
    EXPECT_EQ(f[i].b(), fy[i].c());
    EXPECT_EQ(f[i].c(), fy[i].b());
    EXPECT_EQ(gesture::reconstruct(f[i]).x_u, -gesture::reconstruct(fx[i]).x_u);
  }
}

TEST(SensingSymmetry, StaggeredHoldSkewsAMovingHand) {
  std::vector<HandSample> traj;
  for (int i = 0; i <= 200; ++i) traj.push_back({i / 200.0, 0.0, 0.0, 1.0 + 0.03 * i});
  SensorConfig cfg = quiet();
  cfg.staggered_hold = true;
  SensorSimulator sim(ElectrodeLayout::standard(), cfg);
  const auto frames = sim.run(Trajectory(traj));
  bool skewed = false;
  for (const auto& f : frames) skewed = skewed || f.a() != f.d();
  EXPECT_TRUE(skewed);
}

TEST(Trajectory, RejectsBadSamples) {
  Trajectory t;
  t.append({0.0, 0, 0, 1});
  EXPECT_AIRPAD_ERROR(t.append({0.0, 0, 0, 1}), ErrorCode::kOutOfOrderTimestamp);
  EXPECT_AIRPAD_ERROR(t.append({1.0, 0, 0, -0.1}), ErrorCode::kInvalidArgument);
  EXPECT_AIRPAD_ERROR(t.append({1.0, NAN, 0, 1}), ErrorCode::kInvalidArgument);
}

TEST(Trajectory, InterpolatesLinearly) {
  Trajectory t(std::vector<HandSample>{{0.0, 0, 0, 0}, {1.0, 2, 4, 6}});
  const Vec3 p = t.position_at(0.25);
  EXPECT_DOUBLE_EQ(p.x, 0.5);
  EXPECT_DOUBLE_EQ(p.y, 1.0);
  EXPECT_DOUBLE_EQ(p.z, 1.5);
  EXPECT_TRUE(t.covers(0.0, 1.0));
  EXPECT_FALSE(t.covers(0.0, 1.01));
}

TEST(SensingIo, TrajectoryJsonRoundTrip) {
  const auto traj = hold(0.1, 1.25, -0.5, 3.0);
  const auto back = parse_trajectory_json(trajectory_to_json(traj));
  ASSERT_EQ(back.size(), traj.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].t_s, traj[i].t_s);
    EXPECT_EQ(back[i].x_cm, traj[i].x_cm);
    EXPECT_EQ(back[i].z_cm, traj[i].z_cm);
  }
  const auto parsed = parse_trajectory_json(R"([{"t":0,"x":1,"y":2,"z":3},{"t":0.5,"x":1,"y":2,"z":3}])");
  EXPECT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[1].y_cm, 2.0);
}

TEST(SensingIo, MalformedTrajectoryIsFormatError) {
  for (const char* text : {"not json", R"({"t":0})", R"([{"t":0,"x":1,"y":2}])", R"([{"t":"a","x":1,"y":2,"z":3}])"}) {
    EXPECT_AIRPAD_ERROR(parse_trajectory_json(text), ErrorCode::kFormatError);
  }
}

TEST(SensingIo, FramesCsvHasHeaderAndSixDecimals) {
  std::ostringstream out;
  const std::vector<ChannelFrame> frames{{0.0125, {0.1, 0.25, 0.0, 1.0}}};
  write_frames_csv(out, frames);
  EXPECT_EQ(out.str(), "t,a,b,c,d\n0.012500,0.100000,0.250000,0.000000,1.000000\n");
}

}  // namespace
}  // namespace airpad::sensing
