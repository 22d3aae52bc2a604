// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "airpad/nn/layers.hpp"

namespace airpad::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
};

/// One bias-corrected Adam step over `params` using their `grad` fields.
/// Moments are allocated on the first call; later calls must pass parameters
/// of the same shapes in the same order (kShapeMismatch otherwise).
template <typename T>
void adam_update(std::span<Param<T>* const> params, AdamState<T>& state);

}  // namespace airpad::nn
