// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "airpad/nn/layers.hpp"

namespace airpad::nn::detail {

template <typename T>
std::unique_ptr<Layer<T>> make_lstm(const LayerSpec& spec, const Shape& input_shape);

}  // namespace airpad::nn::detail
