// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "airpad/gesture/raster.hpp"
#include "airpad/nn/model.hpp"
#include "json.hpp"

namespace airpad::nn {

using gesture::DigitImage;

inline constexpr std::uint32_t kBundleVersion = 1;

/// A trained classifier: architecture, float32 weights and training metadata.
/// Immutable once built; copies share the same network.
class ModelBundle {
 public:
  explicit ModelBundle(Model<float> model, nlohmann::json metadata = nlohmann::json::object());

  const ModelSpec& spec() const { return model_->spec(); }
  const Model<float>& model() const { return *model_; }
  const nlohmann::json& metadata() const { return metadata_; }

  /// The JSON header as stored in the file.
  nlohmann::json header() const;

  std::vector<std::uint8_t> encode() const;
  static ModelBundle decode(std::span<const std::uint8_t> bytes);

  void save(const std::filesystem::path& path) const;
  static ModelBundle load(const std::filesystem::path& path);

 private:
  std::shared_ptr<const Model<float>> model_;
  nlohmann::json metadata_;
};

struct Prediction {
  int digit = 0;
  float confidence = 0.0f;
  std::array<float, kNumClasses> probabilities{};
};

/// `image` is a single sample of the bundle's input shape.
Prediction predict(const ModelBundle& bundle, const Tensor<float>& image);
Prediction predict(const ModelBundle& bundle, const DigitImage& image);

/// Stacks images into an [n, 1, 28, 28] batch.
Tensor<float> to_batch(std::span<const DigitImage> images);

struct ConfusionMatrix {
  // rows = true class, cols = predicted
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  void add(std::size_t truth, std::size_t predicted) { ++counts.at(truth).at(predicted); }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::string to_csv() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Every image must carry a label (kInvalidArgument otherwise).
EvalResult evaluate(const Model<float>& model, std::span<const DigitImage> images,
                    std::size_t batch = 256);
EvalResult evaluate(const ModelBundle& bundle, std::span<const DigitImage> images,
                    std::size_t batch = 256);

}  // namespace airpad::nn
