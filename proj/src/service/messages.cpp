// SPDX-License-Identifier: Apache-2.0
#include "airpad/service/messages.hpp"

#include <boost/beast/core/detail/base64.hpp>
#include <cmath>
#include <set>

namespace airpad::service {

namespace {

namespace b64 = boost::beast::detail::base64;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedMessage, what);
}

double number(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  if (!it->is_number()) malformed(std::string("field '") + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) malformed(std::string("field '") + key + "' must be finite");
  return v;
}

void only_fields(const nlohmann::json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) malformed("unexpected field '" + it.key() + "'");
  }
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const double v = number(j, key);
  if constexpr (std::is_integral_v<T>) {
    if (v < 0 || std::floor(v) != v) malformed(std::string("field '") + key + "' must be a non-negative integer");
    return static_cast<T>(j.at(key).get<std::uint64_t>());
  } else {
    return v;
  }
}

}  // namespace

Inbound parse_inbound(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) malformed("invalid JSON");
  if (!j.is_object()) malformed("message must be a JSON object");
  auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) malformed("missing string field 'type'");
  const std::string type = type_it->get<std::string>();

  if (type == "hand_sample") {
    only_fields(j, {"type", "t", "x", "y", "z"});
    return HandSampleMsg{number(j, "t"), number(j, "x"), number(j, "y"), number(j, "z")};
  }
  if (type == "reset") {
    only_fields(j, {"type"});
    return ResetMsg{};
  }
  if (type == "set_config") {
    only_fields(j, {"type", "lambda_cm", "noise_sigma", "filter_cutoff_hz", "idle_offset", "seed",
                    "z_on", "z_off", "min_points"});
    SetConfigMsg m;
    m.lambda_cm = optional_field<double>(j, "lambda_cm");
    m.noise_sigma = optional_field<double>(j, "noise_sigma");
    m.filter_cutoff_hz = optional_field<double>(j, "filter_cutoff_hz");
    m.idle_offset = optional_field<double>(j, "idle_offset");
    m.seed = optional_field<std::uint64_t>(j, "seed");
    m.z_on = optional_field<double>(j, "z_on");
    m.z_off = optional_field<double>(j, "z_off");
    m.min_points = optional_field<std::size_t>(j, "min_points");
    return m;
  }
  malformed("unknown message type '" + type + "'");
}

std::string to_json_text(const Inbound& msg) {
  nlohmann::json j;
  std::visit(
      [&j](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, HandSampleMsg>) {
          j = {{"type", "hand_sample"}, {"t", m.t}, {"x", m.x}, {"y", m.y}, {"z", m.z}};
        } else if constexpr (std::is_same_v<M, ResetMsg>) {
          j = {{"type", "reset"}};
        } else {
          j = {{"type", "set_config"}};
          auto put = [&j](const char* k, const auto& v) {
            if (v) j[k] = *v;
          };
          put("lambda_cm", m.lambda_cm);
          put("noise_sigma", m.noise_sigma);
          put("filter_cutoff_hz", m.filter_cutoff_hz);
          put("idle_offset", m.idle_offset);
          put("seed", m.seed);
          put("z_on", m.z_on);
          put("z_off", m.z_off);
          put("min_points", m.min_points);
        }
      },
      msg);
  return j.dump();
}

std::string type_name(const Outbound& msg) {
  static constexpr const char* kNames[] = {"channels",       "trace_point",       "gesture_started",
                                           "classification", "gesture_discarded", "error"};
  return kNames[msg.index()];
}

bool droppable(const Outbound& msg) { return std::holds_alternative<ChannelsMsg>(msg); }

nlohmann::json to_json(const Outbound& msg) {
  nlohmann::json j = std::visit(
      [](const auto& m) -> nlohmann::json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ChannelsMsg>) {
          return {{"t", m.t}, {"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d}};
        } else if constexpr (std::is_same_v<M, TracePointMsg>) {
          return {{"t", m.t}, {"x", m.x}, {"y", m.y}, {"z", m.z}};
        } else if constexpr (std::is_same_v<M, GestureStartedMsg>) {
          return {{"t", m.t}};
        } else if constexpr (std::is_same_v<M, ClassificationMsg>) {
          return {{"digit", m.digit},
                  {"confidence", m.confidence},
                  {"probs", m.probs},
                  {"image", base64_encode(m.image)}};
        } else if constexpr (std::is_same_v<M, GestureDiscardedMsg>) {
          return {{"points", m.points}};
        } else {
          return {{"code", error_code_name(m.code)}, {"msg", m.msg}};
        }
      },
      msg);
  j["type"] = type_name(msg);
  return j;
}

std::string to_json_text(const Outbound& msg) { return to_json(msg).dump(); }

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::size_t body = text.size();
  while (body > 0 && text.size() - body < 2 && text[body - 1] == '=') --body;
  if (text.size() % 4 != 0) malformed("invalid base64 length");
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), body);
  if (read != body) malformed("invalid base64");
  out.resize(written);
  return out;
}

}  // namespace airpad::service
