// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airpad {

enum class ErrorCode {
  kInvalidArgument,
  kConfigError,
  kTrajectoryGap,
  kInsufficientIdleFrames,
  kOutOfOrderTimestamp,
  kNonPositiveProximity,
  kEmptyTrace,
  kSegmentationFailure,
  kFormatError,
  kShapeMismatch,
  kDivergenceDetected,
  kNoModelLoaded,
  kMalformedMessage,
  kPayloadSizeMismatch,
};

/// Stable identifier used on the wire and in diagnostics, e.g. "TrajectoryGap".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace airpad
