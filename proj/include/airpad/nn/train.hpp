// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airpad/dataset/augment.hpp"
#include "airpad/nn/bundle.hpp"

namespace airpad::nn {

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  // Running mean over the epoch's training batches, in training mode.
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch = 64;
  double learning_rate = 1e-3;
  /// When set, each training batch is augmented on the fly.
  std::optional<dataset::AugmentConfig> augment;
  std::uint64_t seed = 0;
  /// Free-form name stored in the bundle metadata (e.g. "cnn-aug").
  std::string label;
  std::function<void(const EpochMetrics&)> on_epoch;

  void validate() const;
};

struct TrainReport {
  std::vector<EpochMetrics> epochs;
  double wall_seconds = 0.0;

  /// epoch,train_loss,train_acc,val_loss,val_acc
  std::string to_csv() const;
  // timing left out so saved bundles depend only on inputs
  nlohmann::json to_json() const;
};

struct TrainResult {
  ModelBundle bundle;
  TrainReport report;
};

/// Raised when the training loss stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, TrainReport report)
      : Error(ErrorCode::kDivergenceDetected, message), report_(std::move(report)) {}
  const TrainReport& report() const { return report_; }

 private:
  TrainReport report_;
};

/// Sequential mini-batch Adam training with a per-epoch seeded shuffle.
/// Validation runs in inference mode (batch norm running statistics).
TrainResult train(const ModelSpec& spec, std::span<const DigitImage> train_images,
                  std::span<const DigitImage> val_images, const TrainConfig& cfg);

}  // namespace airpad::nn
