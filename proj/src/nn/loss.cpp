// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace airpad::nn {

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.rank() != 2 || logits.dim(1) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "softmax expects [n,k], got " +
                                               shape_string(logits.shape()));
  }
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor<T> p(logits.shape());
  for (std::size_t i = 0; i < n; ++i) {
    const T* row = logits.data() + i * k;
    T* out = p.data() + i * k;
    const T peak = *std::max_element(row, row + k);
    T sum{0};
    for (std::size_t j = 0; j < k; ++j) {
      out[j] = std::exp(row[j] - peak);
      sum += out[j];
    }
    for (std::size_t j = 0; j < k; ++j) out[j] /= sum;
  }
  return p;
}

template <typename T>
double cross_entropy(std::span<const T> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label " + std::to_string(label) + " out of range");
  }
  return -std::log(static_cast<double>(probs[label]) + kLogFloor);
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

template <typename T>
BatchLoss<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels) {
  Tensor<T> p = softmax(logits);
  const std::size_t n = p.dim(0), k = p.dim(1);
  if (labels.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, std::to_string(labels.size()) + " labels for batch of " +
                                               std::to_string(n));
  }
  BatchLoss<T> out;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const T> row(p.data() + i * k, k);
    total += cross_entropy(row, labels[i]);
    if (argmax(row) == labels[i]) ++out.correct;
  }
  out.loss = total / static_cast<double>(n);
  const T inv_n = T{1} / static_cast<T>(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i * k + labels[i]] -= T{1};
    for (std::size_t j = 0; j < k; ++j) p[i * k + j] *= inv_n;
  }
  out.grad = std::move(p);
  return out;
}

#define AIRPAD_LOSS_INSTANTIATE(T)                                                    \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                    \
  template double cross_entropy<T>(std::span<const T>, std::size_t);                  \
  template std::size_t argmax<T>(std::span<const T>);                                 \
  template BatchLoss<T> softmax_cross_entropy<T>(const Tensor<T>&,                    \
                                                 std::span<const std::uint8_t>);

AIRPAD_LOSS_INSTANTIATE(float)
AIRPAD_LOSS_INSTANTIATE(double)

}  // namespace airpad::nn
