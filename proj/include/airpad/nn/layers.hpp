// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "airpad/nn/tensor.hpp"
#include "json.hpp"

namespace airpad::nn {

enum class LayerKind { kConv2D, kBatchNorm, kReLU, kMaxPool2, kFlatten, kDense, kLSTM, kSoftmax };

std::string layer_kind_name(LayerKind kind);
LayerKind layer_kind_from_name(const std::string& name);

/// Architecture-level description of one layer. `units` is the output
/// channel count for Conv2D, the width for Dense and the hidden size for LSTM.
struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  std::size_t units = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t pad = 0;

  static LayerSpec conv2d(std::size_t out_channels, std::size_t kernel, std::size_t stride = 1,
                          std::size_t pad = 0);
  static LayerSpec dense(std::size_t units);
  static LayerSpec lstm(std::size_t hidden);
  static LayerSpec of(LayerKind kind);

  nlohmann::json to_json() const;
  static LayerSpec from_json(const nlohmann::json& j);

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/// A layer over batched tensors. `infer` is const and cache-free so a trained
/// model can be shared across threads; `forward` runs training mode and keeps
/// what `backward` needs. `backward` overwrites parameter gradients.
template <typename T>
class Layer {
 public:
  explicit Layer(Shape input_shape) : input_shape_(std::move(input_shape)) {}
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  virtual Shape output_shape() const = 0;
  const Shape& input_shape() const { return input_shape_; }

  virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;

  virtual std::vector<Param<T>*> params() { return {}; }
  /// Non-trainable persistent state (batch-norm running statistics).
  virtual std::vector<Param<T>*> buffers() { return {}; }
  virtual void initialize(std::mt19937_64& /*rng*/, bool /*relu_follows*/) {}

 protected:
  /// Throws kShapeMismatch unless x is {n} ++ input_shape with n >= 1.
  void check_input(const Tensor<T>& x) const;
  void check_output_grad(const Tensor<T>& dy, std::size_t batch) const;

  Shape input_shape_;
};

/// Builds the concrete layer for `spec` given the per-sample input shape.
/// Throws kShapeMismatch when the input is incompatible with the layer.
template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape);

/// Per-sample output shape of `spec` applied to `input_shape`.
Shape layer_output_shape(const LayerSpec& spec, const Shape& input_shape);

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

}  // namespace airpad::nn
