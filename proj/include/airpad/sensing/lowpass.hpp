// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace airpad::sensing {

/// Discretized first-order RC low-pass: y <- y + alpha * (u - y),
/// alpha = 1 - exp(-2*pi*fc / fs). Unity DC gain.
class OnePoleLowpass {
 public:
  OnePoleLowpass(double cutoff_hz, double sample_rate_hz);

  /// The first call seeds the state with its input.
  double step(double input);

  void reset() { primed_ = false; }
  void reset(double value) {
    state_ = value;
    primed_ = true;
  }

  double alpha() const { return alpha_; }
  double state() const { return state_; }
  bool primed() const { return primed_; }

 private:
  double alpha_;
  double state_ = 0.0;
  bool primed_ = false;
};

}  // namespace airpad::sensing
