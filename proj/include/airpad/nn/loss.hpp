// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "airpad/nn/tensor.hpp"

namespace airpad::nn {

inline constexpr double kLogFloor = 1e-12;

/// Softmax over the last dimension of a [n, k] tensor, max-shifted.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

/// -ln(p[label] + 1e-12)
template <typename T>
double cross_entropy(std::span<const T> probs, std::size_t label);

/// Index of the largest value; the lowest index wins ties.
template <typename T>
std::size_t argmax(std::span<const T> values);

template <typename T>
struct BatchLoss {
  double loss = 0.0;  // mean over the batch
  std::size_t correct = 0;
  Tensor<T> grad;     // d(mean loss)/d(logits) = (p - onehot) / n
};

/// Fused softmax + categorical cross-entropy on [n, k] logits.
template <typename T>
BatchLoss<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels);

}  // namespace airpad::nn
