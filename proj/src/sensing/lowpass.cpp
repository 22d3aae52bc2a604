// SPDX-License-Identifier: Apache-2.0
#include "airpad/sensing/lowpass.hpp"

#include <cmath>
#include <numbers>

#include "airpad/error.hpp"

namespace airpad::sensing {

OnePoleLowpass::OnePoleLowpass(double cutoff_hz, double sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || !(sample_rate_hz > 2.0 * cutoff_hz)) {
    throw Error(ErrorCode::kConfigError, "lowpass cutoff must lie in (0, fs/2)");
  }
  alpha_ = 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz / sample_rate_hz);
}

double OnePoleLowpass::step(double input) {
  if (!primed_) {
    state_ = input;
    primed_ = true;
    return state_;
  }
  state_ += alpha_ * (input - state_);
  return state_;
}

}  // namespace airpad::sensing
