// SPDX-License-Identifier: Apache-2.0
#include "airpad/service/session.hpp"

#include "airpad/gesture/capture.hpp"
#include "airpad/gesture/coordinate.hpp"

namespace airpad::service {

Session::Session(std::string id, std::shared_ptr<const nn::ModelBundle> model, SessionConfig cfg)
    : id_(std::move(id)), model_(std::move(model)), cfg_(std::move(cfg)) {
  cfg_.layout.validate();
  cfg_.sensor.validate();
  cfg_.segmenter.validate();
  rebuild();
}

void Session::rebuild() {
  sim_ = std::make_unique<sensing::SensorSimulator>(cfg_.layout, cfg_.sensor);
  sim_->calibrate();
  segmenter_ = gesture::Segmenter(cfg_.segmenter);
}

std::vector<Outbound> Session::handle_text(std::string_view text) {
  Inbound msg;
  try {
    msg = parse_inbound(text);
  } catch (const Error& e) {
    return {ErrorMsg{e.code(), e.what()}};
  }
  return handle(msg);
}

std::vector<Outbound> Session::handle(const Inbound& msg) {
  std::vector<Outbound> out;
  if (const auto* s = std::get_if<HandSampleMsg>(&msg)) {
    on_sample(*s, out);
  } else if (std::holds_alternative<ResetMsg>(msg)) {
    rebuild();
  } else {
    on_config(std::get<SetConfigMsg>(msg), out);
  }
  return out;
}

void Session::on_sample(const HandSampleMsg& m, std::vector<Outbound>& out) {
  std::vector<sensing::ChannelFrame> frames;
  try {
    frames = sim_->feed({m.t, m.x, m.y, m.z});
  } catch (const Error& e) {
    out.push_back(ErrorMsg{e.code(), e.what()});
    return;
  }
  for (const auto& f : frames) on_frame(f, out);
}

void Session::on_frame(const sensing::ChannelFrame& frame, std::vector<Outbound>& out) {
  out.push_back(ChannelsMsg{frame.t_s, frame.a(), frame.b(), frame.c(), frame.d()});
  const gesture::Coordinate coord = gesture::reconstruct(frame);
  gesture::SegmentEvent ev = segmenter_.step(coord);
  switch (ev.kind) {
    case gesture::SegmentEventKind::kStarted:
      out.push_back(GestureStartedMsg{coord.t_s});
      out.push_back(TracePointMsg{coord.t_s, coord.x_u, coord.y_u, coord.z_u});
      break;
    case gesture::SegmentEventKind::kPoint:
      out.push_back(TracePointMsg{coord.t_s, coord.x_u, coord.y_u, coord.z_u});
      break;
    case gesture::SegmentEventKind::kCompleted: {
      const gesture::DigitImage image = gesture::render_gesture(*ev.trace).quantized();
      if (!model_) {
        out.push_back(ErrorMsg{ErrorCode::kNoModelLoaded, "gesture completed but no model is loaded"});
        break;
      }
      const nn::Prediction p = nn::predict(*model_, image);
      ClassificationMsg c;
      c.digit = p.digit;
      c.confidence = p.confidence;
      std::copy(p.probabilities.begin(), p.probabilities.end(), c.probs.begin());
      const auto bytes = image.to_bytes();
      c.image.assign(bytes.begin(), bytes.end());
      out.push_back(std::move(c));
      break;
    }
    case gesture::SegmentEventKind::kDiscarded:
      out.push_back(GestureDiscardedMsg{ev.discarded_points});
      break;
    case gesture::SegmentEventKind::kIdle: break;
  }
}

void Session::on_config(const SetConfigMsg& m, std::vector<Outbound>& out) {
  SessionConfig next = cfg_;
  if (m.lambda_cm) next.sensor.lambda_cm = *m.lambda_cm;
  if (m.noise_sigma) next.sensor.noise_sigma = *m.noise_sigma;
  if (m.filter_cutoff_hz) next.sensor.filter_cutoff_hz = *m.filter_cutoff_hz;
  if (m.idle_offset) next.sensor.idle_offset = *m.idle_offset;
  if (m.seed) next.sensor.seed = *m.seed;
  if (m.z_on) next.segmenter.z_on = *m.z_on;
  if (m.z_off) next.segmenter.z_off = *m.z_off;
  if (m.min_points) next.segmenter.min_points = *m.min_points;
  try {
    next.sensor.validate();
    next.segmenter.validate();
  } catch (const Error& e) {
    out.push_back(ErrorMsg{e.code(), e.what()});
    return;
  }
  cfg_ = next;
  rebuild();
}

}  // namespace airpad::service
