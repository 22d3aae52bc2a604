// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "airpad/nn/adam.hpp"
#include "airpad/nn/loss.hpp"
#include "airpad/random.hpp"

namespace airpad::nn {

void TrainConfig::validate() const {
  if (batch == 0) throw Error(ErrorCode::kConfigError, "batch must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kConfigError, "learning rate must be finite and >= 0");
  }
  if (augment) augment->validate();
}

std::string TrainReport::to_csv() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << ',' << e.val_loss << ','
        << e.val_accuracy << '\n';
  }
  return out.str();
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    rows.push_back({{"epoch", e.epoch},
                    {"train_loss", e.train_loss},
                    {"train_acc", e.train_accuracy},
                    {"val_loss", e.val_loss},
                    {"val_acc", e.val_accuracy}});
  }
  return {{"epochs", rows}};
}

namespace {

constexpr std::uint64_t kShuffleKey = 0x5f1e;
constexpr std::uint64_t kAugmentKey = 0xa06;

nlohmann::json augment_json(const dataset::AugmentConfig& a) {
  return {{"rotation_deg", {a.rotation_min_deg, a.rotation_max_deg}},
          {"zoom", {a.zoom_min, a.zoom_max}},
          {"shift", {a.shift_min, a.shift_max}}};
}

}  // namespace

TrainResult train(const ModelSpec& spec, std::span<const DigitImage> train_images,
                  std::span<const DigitImage> val_images, const TrainConfig& cfg) {
  cfg.validate();
  if (train_images.empty()) throw Error(ErrorCode::kInvalidArgument, "no training data");
  if (spec.input_shape != kDigitInputShape) {
    throw Error(ErrorCode::kShapeMismatch, "training expects 28x28 input");
  }
  for (const auto& img : train_images) {
    if (!img.label || *img.label >= kNumClasses) {
      throw Error(ErrorCode::kInvalidArgument, "training image without a valid label");
    }
  }

  const auto started = std::chrono::steady_clock::now();
  Model<float> model(spec);
  model.initialize(derive_seed(cfg.seed, {0x1417}));
  AdamState<float> adam;
  adam.config.learning_rate = cfg.learning_rate;
  std::vector<Param<float>*> params = model.params();

  TrainReport report;
  std::vector<std::size_t> order(train_images.size());
  std::vector<DigitImage> batch_images;
  std::vector<std::uint8_t> labels;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, {kShuffleKey, epoch}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t n = std::min(cfg.batch, order.size() - start);
      batch_images.clear();
      labels.clear();
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[start + k];
        if (cfg.augment) {
          std::mt19937_64 rng(derive_seed(cfg.seed, {kAugmentKey, epoch, idx}));
          batch_images.push_back(dataset::augment(train_images[idx], *cfg.augment, rng));
        } else {
          batch_images.push_back(train_images[idx]);
        }
        labels.push_back(*train_images[idx].label);
      }

      const Tensor<float> logits = model.forward(to_batch(batch_images));
      BatchLoss<float> bl = softmax_cross_entropy(logits, labels);
      if (!std::isfinite(bl.loss)) {
        report.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch),
                              std::move(report));
      }
      model.backward(bl.grad);
      adam_update<float>(params, adam);

      loss_sum += bl.loss * static_cast<double>(n);
      correct += bl.correct;
      seen += n;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(seen);
    m.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    if (!val_images.empty()) {
      const EvalResult v = evaluate(model, val_images);
      m.val_loss = v.loss;
      m.val_accuracy = v.accuracy;
    }
    report.epochs.push_back(m);
    if (cfg.on_epoch) cfg.on_epoch(m);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  nlohmann::json meta = {{"label", cfg.label.empty() ? spec.id : cfg.label},
                         {"epochs", cfg.epochs},
                         {"batch", cfg.batch},
                         {"learning_rate", cfg.learning_rate},
                         {"seed", cfg.seed},
                         {"train_size", train_images.size()},
                         {"val_size", val_images.size()},
                         {"augment", cfg.augment ? augment_json(*cfg.augment) : nlohmann::json()},
                         {"report", report.to_json()}};
  return {ModelBundle(std::move(model), std::move(meta)), std::move(report)};
}

}  // namespace airpad::nn
