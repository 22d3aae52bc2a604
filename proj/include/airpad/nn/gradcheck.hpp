// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "airpad/nn/layers.hpp"

namespace airpad::nn {

struct GradCheckOptions {
  double step = 1e-5;
  /// Lower bound on the relative-error denominator so entries whose true
  /// gradient is zero are compared absolutely.
  double floor = 1e-7;
  /// Step of the fourth-order stencil used on the scalar loss.
  double loss_step = 1e-3;
};

struct GradCheckResult {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::string worst;  // which entry produced max_rel_error

  bool passed(double tolerance) const { return max_rel_error <= tolerance; }
};

double relative_error(double analytic, double numeric, double floor);

/// Compares backward() of `layer` (input and parameter gradients) against
/// central differences of L = sum(r * forward(x)) for a random r.
GradCheckResult check_layer(Layer<double>& layer, const Tensor<double>& x, std::uint64_t seed,
                            const GradCheckOptions& opts = {});

/// Fused softmax + cross-entropy gradient against a five-point central
/// difference of the mean loss; plain central differences lose too many
/// digits on entries near 1e-5.
GradCheckResult check_softmax_cross_entropy(const Tensor<double>& logits,
                                            std::span<const std::uint8_t> labels,
                                            const GradCheckOptions& opts = {});

/// Every layer type on small random inputs.
std::vector<GradCheckResult> gradient_suite(std::uint64_t seed, const GradCheckOptions& opts = {});

}  // namespace airpad::nn
