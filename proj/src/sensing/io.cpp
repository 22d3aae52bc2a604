// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "airpad/error.hpp"
#include "json.hpp"

namespace airpad::sensing {

std::vector<HandSample> parse_trajectory_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormatError, std::string("trajectory JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kFormatError, "trajectory JSON must be an array");
  std::vector<HandSample> samples;
  samples.reserve(doc.size());
  for (const auto& item : doc) {
    try {
      samples.push_back({item.at("t").get<double>(), item.at("x").get<double>(),
                         item.at("y").get<double>(), item.at("z").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("trajectory sample: ") + e.what());
    }
  }
  return samples;
}

std::vector<HandSample> read_trajectory_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_json(buf.str());
}

std::string trajectory_to_json(std::span<const HandSample> samples) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& s : samples) {
    doc.push_back({{"t", s.t_s}, {"x", s.x_cm}, {"y", s.y_cm}, {"z", s.z_cm}});
  }
  return doc.dump();
}

void write_trajectory_json(const std::filesystem::path& path, std::span<const HandSample> samples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFormatError, "cannot write " + path.string());
  out << trajectory_to_json(samples) << '\n';
}

void write_frames_csv(std::ostream& out, std::span<const ChannelFrame> frames) {
  out << "t,a,b,c,d\n";
  char line[128];
  for (const auto& f : frames) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f,%.6f\n", f.t_s, f.a(), f.b(), f.c(),
                  f.d());
    out << line;
  }
}

void write_frames_csv(const std::filesystem::path& path, std::span<const ChannelFrame> frames) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kFormatError, "cannot write " + path.string());
  write_frames_csv(out, frames);
}

}  // namespace airpad::sensing
