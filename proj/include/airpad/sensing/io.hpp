// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "airpad/sensing/calibration.hpp"
#include "airpad/sensing/geometry.hpp"

namespace airpad::sensing {

// Trajectory replay files: JSON array of {"t": s, "x": cm, "y": cm, "z": cm}.
std::vector<HandSample> parse_trajectory_json(const std::string& text);
std::vector<HandSample> read_trajectory_json(const std::filesystem::path& path);
std::string trajectory_to_json(std::span<const HandSample> samples);
void write_trajectory_json(const std::filesystem::path& path, std::span<const HandSample> samples);

// Frame dumps: CSV with header t,a,b,c,d and 6 decimal places.
void write_frames_csv(std::ostream& out, std::span<const ChannelFrame> frames);
void write_frames_csv(const std::filesystem::path& path, std::span<const ChannelFrame> frames);

}  // namespace airpad::sensing
