// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "airpad/sensing/calibration.hpp"

namespace airpad::gesture {

/// Reconstructed hand position. x_u, y_u in [-1, 1]; z_u is proximity in [0, 1].
struct Coordinate {
  double x_u = 0.0;
  double y_u = 0.0;
  double z_u = 0.0;
  double t_s = 0.0;

  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

/// X = A - D, Y = B - C, Z = (A + B + C + D) / 4 on a baseline-subtracted frame.
Coordinate reconstruct(const sensing::ChannelFrame& frame);

/// Display-only range estimate, -lambda * ln(z_u): the mean slant range that
/// would give proximity z_u under the exponential response law.
/// Throws kNonPositiveProximity for z_u <= 0.
double estimate_distance(double z_u, double lambda_cm = 4.0);

}  // namespace airpad::gesture
