// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "airpad/gesture/segmenter.hpp"
#include "airpad/nn/bundle.hpp"
#include "airpad/sensing/simulator.hpp"
#include "airpad/service/messages.hpp"

namespace airpad::service {

struct SessionConfig {
  sensing::ElectrodeLayout layout = sensing::ElectrodeLayout::standard();
  sensing::SensorConfig sensor;
  gesture::SegmenterConfig segmenter;
};

/// One live simulate -> segment -> classify pipeline. Pure message in,
/// messages out; the caller serializes access.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const nn::ModelBundle> model,
          SessionConfig cfg = {});

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  gesture::Segmenter::Mode mode() const { return segmenter_.mode(); }

  /// Parses and handles one text frame. Malformed input yields a single
  /// error message and leaves the session untouched.
  std::vector<Outbound> handle_text(std::string_view text);
  std::vector<Outbound> handle(const Inbound& msg);

 private:
  void rebuild();
  void on_sample(const HandSampleMsg& m, std::vector<Outbound>& out);
  void on_config(const SetConfigMsg& m, std::vector<Outbound>& out);
  void on_frame(const sensing::ChannelFrame& frame, std::vector<Outbound>& out);

  std::string id_;
  std::shared_ptr<const nn::ModelBundle> model_;
  SessionConfig cfg_;
  std::unique_ptr<sensing::SensorSimulator> sim_;
  gesture::Segmenter segmenter_;
};

}  // namespace airpad::service
