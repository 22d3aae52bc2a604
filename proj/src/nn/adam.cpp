// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/adam.hpp"

#include <cmath>

namespace airpad::nn {

template <typename T>
void adam_update(std::span<Param<T>* const> params, AdamState<T>& state) {
  if (state.m.empty() && state.step == 0) {
    for (const Param<T>* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adam state tracks " + std::to_string(state.m.size()) +
                                               " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Param<T>& p = *params[i];
    if (p.value.shape() != state.m[i].shape() || p.grad.shape() != p.value.shape()) {
      throw Error(ErrorCode::kShapeMismatch, "adam shape mismatch for " + p.name);
    }
  }

  ++state.step;
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
  const T step_size = static_cast<T>(c.learning_rate / corr1);
  const T inv_sqrt_corr2 = static_cast<T>(1.0 / std::sqrt(corr2));
  const T eps = static_cast<T>(c.epsilon);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Param<T>& p = *params[i];
    T* m = state.m[i].data();
    T* v = state.v[i].data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const T g = p.grad[j];
      m[j] = b1 * m[j] + (T{1} - b1) * g;
      v[j] = b2 * v[j] + (T{1} - b2) * g * g;
      p.value[j] -= step_size * m[j] / (std::sqrt(v[j]) * inv_sqrt_corr2 + eps);
    }
  }
}

template void adam_update<float>(std::span<Param<float>* const>, AdamState<float>&);
template void adam_update<double>(std::span<Param<double>* const>, AdamState<double>&);

}  // namespace airpad::nn
