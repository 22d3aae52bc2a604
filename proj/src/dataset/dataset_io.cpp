// SPDX-License-Identifier: Apache-2.0
#include "airpad/dataset/dataset_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "airpad/error.hpp"
#include "json.hpp"

namespace airpad::dataset {

namespace {

constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 1 + 1;
constexpr std::size_t kRecordBytes = 1 + gesture::kImagePixels;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kFormatError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

std::vector<std::uint8_t> encode_split(std::span<const DigitImage> images) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + images.size() * kRecordBytes);
  out.insert(out.end(), std::begin(kDatasetMagic), std::end(kDatasetMagic));
  put_u32(out, kDatasetVersion);
  put_u32(out, static_cast<std::uint32_t>(images.size()));
  out.push_back(static_cast<std::uint8_t>(gesture::kImageSide));
  out.push_back(static_cast<std::uint8_t>(gesture::kImageSide));
  for (const auto& img : images) {
    if (!img.label || *img.label > 9) {
      throw Error(ErrorCode::kInvalidArgument, "dataset images need a label in 0-9");
    }
    out.push_back(*img.label);
    const auto px = img.to_bytes();
    out.insert(out.end(), px.begin(), px.end());
  }
  return out;
}

std::vector<DigitImage> decode_split(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::kFormatError, "truncated header");
  if (std::memcmp(bytes.data(), kDatasetMagic, 4) != 0) {
    throw Error(ErrorCode::kFormatError, "bad magic, expected APDS");
  }
  if (get_u32(bytes, 4) != kDatasetVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported version " + std::to_string(get_u32(bytes, 4)));
  }
  const std::uint32_t count = get_u32(bytes, 8);
  if (bytes[12] != gesture::kImageSide || bytes[13] != gesture::kImageSide) {
    throw Error(ErrorCode::kFormatError, "images must be 28x28");
  }
  const std::size_t expected = kHeaderBytes + static_cast<std::size_t>(count) * kRecordBytes;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kFormatError, "length mismatch: header says " + std::to_string(count) +
                                             " records (" + std::to_string(expected) +
                                             " bytes), file has " + std::to_string(bytes.size()));
  }
  std::vector<DigitImage> images;
  images.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = kHeaderBytes + i * kRecordBytes;
    const std::uint8_t label = bytes[at];
    if (label > 9) throw Error(ErrorCode::kFormatError, "label out of range");
    images.push_back(
        DigitImage::from_bytes(bytes.subspan(at + 1, gesture::kImagePixels), label));
  }
  return images;
}

void save_split(const std::filesystem::path& path, std::span<const DigitImage> images) {
  write_file(path, encode_split(images));
}

std::vector<DigitImage> load_split(const std::filesystem::path& path) {
  return decode_split(read_file(path));
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset,
                  const ManifestInfo& info) {
  std::filesystem::create_directories(dir);
  for (const char* split : {"train", "test"}) {
    const auto& images = std::string(split) == "train" ? dataset.train : dataset.test;
    save_split(dir / (std::string(split) + ".apds"), images);
    const nlohmann::ordered_json manifest = {{"seed", info.seed},
                                             {"per_class", info.per_class},
                                             {"split", split},
                                             {"count", images.size()},
                                             {"generator_version", info.generator_version}};
    std::ofstream out(dir / (std::string(split) + ".json"), std::ios::trunc);
    if (!out) throw Error(ErrorCode::kFormatError, "cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.train = load_split(dir / "train.apds");
  ds.test = load_split(dir / "test.apds");
  return ds;
}

}  // namespace airpad::dataset
