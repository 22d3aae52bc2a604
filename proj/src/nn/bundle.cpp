// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/bundle.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "airpad/nn/loss.hpp"

namespace airpad::nn {

static_assert(std::endian::native == std::endian::little, "bundle I/O assumes little-endian");

namespace {

constexpr char kMagic[4] = {'A', 'P', 'N', 'N'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

}  // namespace

ModelBundle::ModelBundle(Model<float> model, nlohmann::json metadata)
    : model_(std::make_shared<const Model<float>>(std::move(model))),
      metadata_(std::move(metadata)) {}

nlohmann::json ModelBundle::header() const {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : model_->tensors()) {
    tensors.push_back({{"name", t.name}, {"shape", t.value->shape()}});
  }
  return {{"format", "APNN"},
          {"version", kBundleVersion},
          {"model", spec().to_json()},
          {"tensors", tensors},
          {"metadata", metadata_}};
}

std::vector<std::uint8_t> ModelBundle::encode() const {
  const std::string head = header().dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kBundleVersion);
  put_u32(out, static_cast<std::uint32_t>(head.size()));
  out.insert(out.end(), head.begin(), head.end());
  for (const auto& t : model_->tensors()) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(t.value->data());
    out.insert(out.end(), p, p + t.value->size() * sizeof(float));
  }
  return out;
}

ModelBundle ModelBundle::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw Error(ErrorCode::kFormatError, "not an APNN model file");
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kBundleVersion) {
    throw Error(ErrorCode::kFormatError, "unsupported model version " + std::to_string(version));
  }
  const std::size_t head_len = get_u32(bytes, 8);
  if (bytes.size() < 12 + head_len) throw Error(ErrorCode::kFormatError, "truncated header");

  nlohmann::json head;
  try {
    head = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + head_len);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad header: ") + e.what());
  }

  Model<float> model = [&] {
    try {
      return Model<float>(ModelSpec::from_json(head.at("model")));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("bad header: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kFormatError) throw;
      throw Error(ErrorCode::kFormatError, std::string("bad architecture: ") + e.what());
    }
  }();

  auto tensors = model.tensors();
  nlohmann::json listed;
  try {
    listed = head.at("tensors");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("bad header: ") + e.what());
  }
  if (!listed.is_array() || listed.size() != tensors.size()) {
    throw Error(ErrorCode::kFormatError, "tensor list does not match architecture");
  }
  std::size_t at = 12 + head_len;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Tensor<float>& dst = tensors[i].param->value;
    try {
      if (listed[i].at("name").get<std::string>() != tensors[i].name ||
          listed[i].at("shape").get<Shape>() != dst.shape()) {
        throw Error(ErrorCode::kFormatError, "tensor " + tensors[i].name + " mismatch");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, std::string("bad tensor entry: ") + e.what());
    }
    const std::size_t n = dst.size() * sizeof(float);
    if (bytes.size() < at + n) throw Error(ErrorCode::kFormatError, "truncated tensor payload");
    std::memcpy(dst.data(), bytes.data() + at, n);
    at += n;
  }
  if (at != bytes.size()) throw Error(ErrorCode::kFormatError, "trailing bytes after tensors");

  return ModelBundle(std::move(model), head.value("metadata", nlohmann::json::object()));
}

void ModelBundle::save(const std::filesystem::path& path) const {
  const auto bytes = encode();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed for " + path.string());
}

ModelBundle ModelBundle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFormatError, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

Prediction predict(const ModelBundle& bundle, const Tensor<float>& image) {
  if (image.shape() != bundle.spec().input_shape) {
    throw Error(ErrorCode::kShapeMismatch, "model expects " +
                                               shape_string(bundle.spec().input_shape) +
                                               ", got " + shape_string(image.shape()));
  }
  Tensor<float> x = image;
  x.reshape(batched(1, image.shape()));
  const Tensor<float> p = bundle.model().probabilities(x);
  Prediction out;
  std::copy(p.values().begin(), p.values().end(), out.probabilities.begin());
  out.digit = static_cast<int>(argmax<float>(out.probabilities));
  out.confidence = out.probabilities[static_cast<std::size_t>(out.digit)];
  return out;
}

Prediction predict(const ModelBundle& bundle, const DigitImage& image) {
  return predict(bundle, Tensor<float>(kDigitInputShape, std::vector<float>(image.pixels.begin(),
                                                                            image.pixels.end())));
}

Tensor<float> to_batch(std::span<const DigitImage> images) {
  Tensor<float> x(batched(images.size(), kDigitInputShape));
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i].pixels.begin(), images[i].pixels.end(),
              x.data() + i * gesture::kImagePixels);
  }
  return x;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) t += row_sum(r);
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) t += counts[r][r];
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t t = 0;
  for (auto c : counts.at(truth)) t += c;
  return t;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  for (const auto& row : counts) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
  return out.str();
}

EvalResult evaluate(const ModelBundle& bundle, std::span<const DigitImage> images,
                    std::size_t batch) {
  return evaluate(bundle.model(), images, batch);
}

EvalResult evaluate(const Model<float>& model, std::span<const DigitImage> images,
                    std::size_t batch) {
  if (model.spec().input_shape != kDigitInputShape) {
    throw Error(ErrorCode::kShapeMismatch,
                "model input " + shape_string(model.spec().input_shape) + " is not 28x28");
  }
  EvalResult r;
  if (images.empty()) return r;
  batch = std::max<std::size_t>(batch, 1);
  double loss = 0.0;
  for (std::size_t start = 0; start < images.size(); start += batch) {
    const auto chunk = images.subspan(start, std::min(batch, images.size() - start));
    const Tensor<float> p = model.probabilities(to_batch(chunk));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (!chunk[i].label) {
        throw Error(ErrorCode::kInvalidArgument, "image " + std::to_string(start + i) + " has no label");
      }
      std::span<const float> row(p.data() + i * kNumClasses, kNumClasses);
      loss += cross_entropy(row, *chunk[i].label);
      r.confusion.add(*chunk[i].label, argmax(row));
    }
  }
  r.loss = loss / static_cast<double>(images.size());
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(images.size());
  return r;
}

}  // namespace airpad::nn
