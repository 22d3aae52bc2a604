// SPDX-License-Identifier: Apache-2.0
#include "airpad/gesture/coordinate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "airpad/error.hpp"

namespace airpad::gesture {

Coordinate reconstruct(const sensing::ChannelFrame& frame) {
  return {frame.a() - frame.d(), frame.b() - frame.c(),
          (frame.a() + frame.b() + frame.c() + frame.d()) / 4.0, frame.t_s};
}

double estimate_distance(double z_u, double lambda_cm) {
  if (!(z_u > 0.0)) {
    throw Error(ErrorCode::kNonPositiveProximity, "z_u=" + std::to_string(z_u));
  }
  return std::max(0.0, -lambda_cm * std::log(z_u));
}

}  // namespace airpad::gesture
