// SPDX-License-Identifier: Apache-2.0
#include "airpad/dataset/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "airpad/dataset/templates.hpp"
#include "airpad/error.hpp"
#include "airpad/random.hpp"

namespace airpad::dataset {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxAttempts = 8;

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

}  // namespace

void SynthConfig::validate() const {
  if (per_class < 1) throw Error(ErrorCode::kConfigError, "per_class must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw Error(ErrorCode::kConfigError, "split_ratio must lie in (0, 1)");
  }
  if (jitter < 0.0) throw Error(ErrorCode::kConfigError, "jitter must be >= 0");
  if (speed_variation < 0.0 || speed_variation >= 0.5) {
    throw Error(ErrorCode::kConfigError, "speed_variation must lie in [0, 0.5)");
  }
  if (!(draw_z_cm - draw_z_wobble_cm > 0.0)) {
    throw Error(ErrorCode::kConfigError, "drawing height must stay above the pads");
  }
  if (!(approach_z_cm > draw_z_cm + draw_z_wobble_cm) ||
      !(retract_z_cm > draw_z_cm + draw_z_wobble_cm)) {
    throw Error(ErrorCode::kConfigError, "approach/retract heights must exceed the drawing band");
  }
  if (!(sample_rate_hz > 0.0) || !(draw_span_cm > 0.0)) {
    throw Error(ErrorCode::kConfigError, "sample rate and draw span must be positive");
  }
}

SynthDetail synth_trajectory_detail(int digit, const SynthConfig& cfg, std::mt19937_64& rng) {
  const DigitTemplate& tmpl = digit_template(digit);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Point2> control = tmpl.control_points;
  for (auto& p : control) {
    p.x += cfg.jitter * gauss(rng);
    p.y += cfg.jitter * gauss(rng);
  }

  SynthDetail out;
  out.template_path = catmull_rom(tmpl.control_points);
  out.drawn_path = catmull_rom(control);
  const std::vector<double> cum = cumulative_arclength(out.drawn_path);

  const double v = cfg.speed_variation;
  const double pace = uniform(1.0 - v, 1.0 + v);
  const double modulation = uniform(-v, v);
  const double approach_s = uniform(0.22, 0.3);
  const double retract_s = uniform(0.22, 0.3);
  const double draw_s = std::clamp((0.5 + 0.25 * cum.back()) * pace, 1.0 - approach_s - retract_s,
                                   2.0 - approach_s - retract_s);
  const double wobble_amp = uniform(0.0, cfg.draw_z_wobble_cm);
  const double wobble_freq = uniform(0.5, 1.5);
  const double wobble_phase = uniform(0.0, kTwoPi);

  const auto to_cm = [&](const Point2& p) {
    return Point2{(p.x - 0.5) * cfg.draw_span_cm, (p.y - 0.5) * cfg.draw_span_cm};
  };
  const auto draw_z = [&](double tau) {
    return cfg.draw_z_cm + wobble_amp * std::sin(kTwoPi * wobble_freq * tau + wobble_phase);
  };
  // Monotone arclength schedule with speed in [1 - |m|, 1 + |m|] of the mean.
  const auto progress = [&](double tau) {
    return tau - modulation / kTwoPi * std::sin(kTwoPi * tau);
  };

  const Point2 start = to_cm(out.drawn_path.front());
  const Point2 end = to_cm(out.drawn_path.back());
  const double z_start = draw_z(0.0);
  const double z_end = draw_z(1.0);
  const double total = approach_s + draw_s + retract_s;
  out.draw_begin_s = approach_s;
  out.draw_end_s = approach_s + draw_s;

  const auto n = static_cast<std::size_t>(std::ceil(total * cfg.sample_rate_hz));
  out.samples.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / cfg.sample_rate_hz;
    sensing::HandSample s;
    s.t_s = t;
    if (t < approach_s) {
      const double w = smoothstep(t / approach_s);
      s.x_cm = start.x;
      s.y_cm = start.y;
      s.z_cm = cfg.approach_z_cm + w * (z_start - cfg.approach_z_cm);
    } else if (t <= approach_s + draw_s) {
      const double tau = (t - approach_s) / draw_s;
      const Point2 p = to_cm(point_at_arclength(out.drawn_path, cum, progress(tau)));
      s.x_cm = p.x;
      s.y_cm = p.y;
      s.z_cm = draw_z(tau);
    } else {
      const double w = smoothstep((t - approach_s - draw_s) / retract_s);
      s.x_cm = end.x;
      s.y_cm = end.y;
      s.z_cm = z_end + w * (cfg.retract_z_cm - z_end);
    }
    out.samples.push_back(s);
  }
  return out;
}

std::vector<sensing::HandSample> synth_trajectory(int digit, const SynthConfig& cfg,
                                                  std::mt19937_64& rng) {
  return synth_trajectory_detail(digit, cfg, rng).samples;
}

std::optional<DigitImage> synth_image(int digit, const SynthConfig& cfg,
                                      const sensing::SensorConfig& sensor_cfg,
                                      std::uint64_t stream_seed) {
  std::mt19937_64 rng(stream_seed);
  const auto samples = synth_trajectory(digit, cfg, rng);
  sensing::SensorConfig sensor = sensor_cfg;
  sensor.seed = derive_seed(stream_seed, {0x5e45});
  const auto captured =
      gesture::capture(samples, sensing::ElectrodeLayout::standard(), sensor);
  if (captured.gestures.size() != 1 || captured.started != 1) return std::nullopt;
  DigitImage img = gesture::render_gesture(captured.gestures.front()).quantized();
  img.label = static_cast<std::uint8_t>(digit);
  return img;
}

BuildResult build_dataset(const SynthConfig& cfg, const sensing::SensorConfig& sensor_cfg,
                          unsigned threads) {
  cfg.validate();
  sensor_cfg.validate();
  const std::size_t per_class = cfg.per_class;
  const std::size_t total = 10 * per_class;

  std::vector<DigitImage> images(total);
  std::vector<std::size_t> failures(total, 0);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const int digit = static_cast<int>(k / per_class);
      const std::size_t index = k % per_class;
      for (int attempt = 0;; ++attempt) {
        const std::uint64_t stream = derive_seed(
            cfg.seed, {static_cast<std::uint64_t>(digit), index, static_cast<std::uint64_t>(attempt)});
        if (auto img = synth_image(digit, cfg, sensor_cfg, stream)) {
          images[k] = std::move(*img);
          break;
        }
        ++failures[k];
        if (attempt + 1 >= kMaxAttempts) {
          throw Error(ErrorCode::kSegmentationFailure,
                      "digit " + std::to_string(digit) + " index " + std::to_string(index) +
                          " failed " + std::to_string(kMaxAttempts) + " attempts");
        }
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, total);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t b = std::min(total, w * chunk), e = std::min(total, b + chunk);
      pool.emplace_back([&, w, b, e] {
        try {
          work(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }

  BuildResult result;
  result.report.trajectories = total;
  for (std::size_t f : failures) result.report.failures += f;
  const std::size_t attempts = total + result.report.failures;
  if (static_cast<double>(result.report.failures) >
      kMaxSegmentationFailureRate * static_cast<double>(attempts)) {
    throw Error(ErrorCode::kSegmentationFailure,
                std::to_string(result.report.failures) + " of " + std::to_string(attempts) +
                    " trajectories did not segment into exactly one gesture");
  }

  const auto n_train =
      static_cast<std::size_t>(std::floor(static_cast<double>(per_class) * cfg.split_ratio + 1e-9));
  std::mt19937_64 split_rng(derive_seed(cfg.seed, {0x5b117}));
  for (std::size_t digit = 0; digit < 10; ++digit) {
    std::vector<std::size_t> order(per_class);
    for (std::size_t i = 0; i < per_class; ++i) order[i] = digit * per_class + i;
    std::shuffle(order.begin(), order.end(), split_rng);
    for (std::size_t i = 0; i < per_class; ++i) {
      auto& dst = i < n_train ? result.dataset.train : result.dataset.test;
      dst.push_back(images[order[i]]);
    }
  }
  std::shuffle(result.dataset.train.begin(), result.dataset.train.end(), split_rng);
  std::shuffle(result.dataset.test.begin(), result.dataset.test.end(), split_rng);
  return result;
}

}  // namespace airpad::dataset
