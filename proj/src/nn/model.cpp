// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/model.hpp"

namespace airpad::nn {

ModelSpec ModelSpec::preset(const std::string& name) {
  ModelSpec s;
  if (name == "cnn" || name == "cnn-aug") {
    s.id = "cnn";
    s.layers = {LayerSpec::conv2d(32, 3, 1, 1), LayerSpec::of(LayerKind::kBatchNorm),
                LayerSpec::of(LayerKind::kReLU),  LayerSpec::conv2d(32, 3, 1, 1),
                LayerSpec::of(LayerKind::kBatchNorm), LayerSpec::of(LayerKind::kReLU),
                LayerSpec::of(LayerKind::kMaxPool2), LayerSpec::conv2d(64, 3, 1, 1),
                LayerSpec::of(LayerKind::kBatchNorm), LayerSpec::of(LayerKind::kReLU),
                LayerSpec::of(LayerKind::kMaxPool2), LayerSpec::of(LayerKind::kFlatten),
                LayerSpec::dense(128),            LayerSpec::of(LayerKind::kReLU),
                LayerSpec::dense(kNumClasses),    LayerSpec::of(LayerKind::kSoftmax)};
  } else if (name == "mlp") {
    s.id = "mlp";
    s.layers = {LayerSpec::of(LayerKind::kFlatten), LayerSpec::dense(256),
                LayerSpec::of(LayerKind::kReLU),    LayerSpec::dense(128),
                LayerSpec::of(LayerKind::kReLU),    LayerSpec::dense(kNumClasses),
                LayerSpec::of(LayerKind::kSoftmax)};
  } else if (name == "rnn") {
    s.id = "rnn";
    s.layers = {LayerSpec::lstm(128), LayerSpec::dense(kNumClasses),
                LayerSpec::of(LayerKind::kSoftmax)};
  } else {
    throw Error(ErrorCode::kConfigError, "unknown model '" + name + "'");
  }
  return s;
}

std::vector<Shape> ModelSpec::layer_shapes() const {
  std::vector<Shape> shapes{input_shape};
  for (const LayerSpec& l : layers) shapes.push_back(layer_output_shape(l, shapes.back()));
  return shapes;
}

void ModelSpec::validate() const {
  if (id != "cnn" && id != "mlp" && id != "rnn") {
    throw Error(ErrorCode::kConfigError, "unknown model id '" + id + "'");
  }
  if (layers.empty() || layers.back().kind != LayerKind::kSoftmax) {
    throw Error(ErrorCode::kShapeMismatch, "model must end in softmax");
  }
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::kSoftmax) {
      throw Error(ErrorCode::kShapeMismatch, "softmax must be terminal");
    }
  }
  const Shape out = layer_shapes().back();
  if (out != Shape{kNumClasses}) {
    throw Error(ErrorCode::kShapeMismatch, "model output " + shape_string(out) + ", want [10]");
  }
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json layers_json = nlohmann::json::array();
  for (const LayerSpec& l : layers) layers_json.push_back(l.to_json());
  return {{"id", id}, {"input_shape", input_shape}, {"layers", layers_json}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  try {
    ModelSpec s;
    s.id = j.at("id").get<std::string>();
    s.input_shape = j.at("input_shape").get<Shape>();
    for (const auto& l : j.at("layers")) s.layers.push_back(LayerSpec::from_json(l));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("model spec: ") + e.what());
  }
}

template <typename T>
Model<T>::Model(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  Shape shape = spec_.input_shape;
  for (const LayerSpec& l : spec_.layers) {
    layers_.push_back(make_layer<T>(l, shape));
    shape = layers_.back()->output_shape();
  }
}

template <typename T>
Model<T>::Model(const Model& other) : Model(other.spec_) {
  auto src = other.tensors();
  auto dst = tensors();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i].param->value = *src[i].value;
}

template <typename T>
Model<T>& Model<T>::operator=(const Model& other) {
  if (this != &other) *this = Model(other);
  return *this;
}

template <typename T>
Model<T>::~Model() = default;

template <typename T>
std::size_t Model<T>::body_size() const {
  return layers_.size() - 1;
}

template <typename T>
void Model<T>::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    // He init when a ReLU follows, looking through batch norm.
    std::size_t next = i + 1;
    while (next < layers_.size() && spec_.layers[next].kind == LayerKind::kBatchNorm) ++next;
    const bool relu = next < layers_.size() && spec_.layers[next].kind == LayerKind::kReLU;
    layers_[i]->initialize(rng, relu);
  }
}

template <typename T>
Tensor<T> Model<T>::logits(const Tensor<T>& x) const {
  Tensor<T> y = layers_.front()->infer(x);
  for (std::size_t i = 1; i < body_size(); ++i) y = layers_[i]->infer(y);
  return y;
}

template <typename T>
Tensor<T> Model<T>::probabilities(const Tensor<T>& x) const {
  return layers_.back()->infer(logits(x));
}

template <typename T>
Tensor<T> Model<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = layers_.front()->forward(x);
  for (std::size_t i = 1; i < body_size(); ++i) y = layers_[i]->forward(y);
  return y;
}

template <typename T>
Tensor<T> Model<T>::backward(const Tensor<T>& dlogits) {
  Tensor<T> g = layers_[body_size() - 1]->backward(dlogits);
  for (std::size_t i = body_size() - 1; i-- > 0;) g = layers_[i]->backward(g);
  return g;
}

template <typename T>
std::vector<Param<T>*> Model<T>::params() {
  std::vector<Param<T>*> out;
  for (auto& l : layers_) {
    for (Param<T>* p : l->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<NamedTensor<T>> Model<T>::tensors() {
  std::vector<NamedTensor<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = std::to_string(i) + "." + layer_kind_name(spec_.layers[i].kind) + ".";
    for (Param<T>* p : layers_[i]->params()) out.push_back({prefix + p->name, p, true});
    for (Param<T>* p : layers_[i]->buffers()) out.push_back({prefix + p->name, p, false});
  }
  return out;
}

template <typename T>
std::vector<TensorView<T>> Model<T>::tensors() const {
  std::vector<TensorView<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = std::to_string(i) + "." + layer_kind_name(spec_.layers[i].kind) + ".";
    for (const Param<T>* p : layers_[i]->params()) out.push_back({prefix + p->name, &p->value, true});
    for (const Param<T>* p : layers_[i]->buffers()) out.push_back({prefix + p->name, &p->value, false});
  }
  return out;
}

template class Model<float>;
template class Model<double>;

}  // namespace airpad::nn
