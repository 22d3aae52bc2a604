// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "airpad/dataset/synth.hpp"

namespace airpad::dataset {

// Split file, little-endian:
//   "APDS" | u32 version = 1 | u32 count | u8 rows = 28 | u8 cols = 28 |
//   count x ([u8 label][784 u8 pixels])
inline constexpr char kDatasetMagic[4] = {'A', 'P', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;

std::vector<std::uint8_t> encode_split(std::span<const DigitImage> images);
/// Throws kFormatError on bad magic, version, geometry or length.
std::vector<DigitImage> decode_split(std::span<const std::uint8_t> bytes);

void save_split(const std::filesystem::path& path, std::span<const DigitImage> images);
std::vector<DigitImage> load_split(const std::filesystem::path& path);

struct ManifestInfo {
  std::uint64_t seed = 0;
  std::size_t per_class = 0;
  std::string generator_version = "airpad-synth-1";
};

/// Writes DIR/train.apds, DIR/test.apds and a JSON manifest beside each.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                  const ManifestInfo& info);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace airpad::dataset
