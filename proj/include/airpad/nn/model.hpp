// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "airpad/nn/layers.hpp"
#include "json.hpp"

namespace airpad::nn {

inline const Shape kDigitInputShape = {1, 28, 28};
inline constexpr std::size_t kNumClasses = 10;

struct ModelSpec {
  std::string id;  // cnn, mlp or rnn
  Shape input_shape = kDigitInputShape;
  std::vector<LayerSpec> layers;

  /// cnn, cnn-aug (same network as cnn), mlp, rnn.
  static ModelSpec preset(const std::string& name);

  /// Throws kShapeMismatch unless the layers chain from input_shape to [10]
  /// and end in a single softmax; kConfigError for an unknown id.
  void validate() const;
  std::vector<Shape> layer_shapes() const;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

template <typename T>
struct NamedTensor {
  std::string name;  // "{index}.{kind}.{param}"
  Param<T>* param;
  bool trainable;
};

template <typename T>
struct TensorView {
  std::string name;
  const Tensor<T>* value;
  bool trainable;
};

/// Sequential network. The terminal softmax is skipped by `logits` and
/// `forward` so training can use the fused softmax/cross-entropy gradient.
template <typename T>
class Model {
 public:
  explicit Model(ModelSpec spec);
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;
  ~Model();

  const ModelSpec& spec() const { return spec_; }

  void initialize(std::uint64_t seed);

  Tensor<T> logits(const Tensor<T>& x) const;
  Tensor<T> probabilities(const Tensor<T>& x) const;

  Tensor<T> forward(const Tensor<T>& x);
  Tensor<T> backward(const Tensor<T>& dlogits);

  std::vector<Param<T>*> params();
  std::vector<NamedTensor<T>> tensors();
  std::vector<TensorView<T>> tensors() const;

  std::size_t num_layers() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }

  /// Copies every tensor into a model of another precision.
  template <typename U>
  Model<U> cast() const {
    Model<U> out(spec_);
    auto src = tensors();
    auto dst = out.tensors();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i].param->value = src[i].value->template cast<U>();
    return out;
  }

 private:
  std::size_t body_size() const;

  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace airpad::nn
