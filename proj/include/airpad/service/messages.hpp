// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "airpad/error.hpp"
#include "json.hpp"

namespace airpad::service {

// Inbound

struct HandSampleMsg {
  double t = 0.0;  // seconds
  double x = 0.0;  // cm
  double y = 0.0;
  double z = 0.0;
};

struct ResetMsg {};

/// Every field is optional; absent fields keep the session's current value.
struct SetConfigMsg {
  std::optional<double> lambda_cm;
  std::optional<double> noise_sigma;
  std::optional<double> filter_cutoff_hz;
  std::optional<double> idle_offset;
  std::optional<std::uint64_t> seed;
  std::optional<double> z_on;
  std::optional<double> z_off;
  std::optional<std::size_t> min_points;
};

using Inbound = std::variant<HandSampleMsg, ResetMsg, SetConfigMsg>;

/// Throws kMalformedMessage on bad JSON, unknown types, unknown or
/// non-numeric fields.
Inbound parse_inbound(std::string_view text);
std::string to_json_text(const Inbound& msg);

// Outbound

struct ChannelsMsg {
  double t = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

struct TracePointMsg {
  double t = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
};

struct GestureStartedMsg {
  double t = 0.0;
};

struct ClassificationMsg {
  int digit = 0;
  double confidence = 0.0;
  std::array<double, 10> probs{};
  std::vector<std::uint8_t> image;  // 784 bytes, base64 on the wire
};

struct GestureDiscardedMsg {
  std::size_t points = 0;
};

struct ErrorMsg {
  ErrorCode code = ErrorCode::kMalformedMessage;
  std::string msg;
};

using Outbound = std::variant<ChannelsMsg, TracePointMsg, GestureStartedMsg, ClassificationMsg,
                              GestureDiscardedMsg, ErrorMsg>;

std::string type_name(const Outbound& msg);
/// Only channel frames may be dropped under backpressure.
bool droppable(const Outbound& msg);
nlohmann::json to_json(const Outbound& msg);
std::string to_json_text(const Outbound& msg);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
/// Throws kMalformedMessage on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace airpad::service
