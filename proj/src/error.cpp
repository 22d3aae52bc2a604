// SPDX-License-Identifier: Apache-2.0
#include "airpad/error.hpp"

namespace airpad {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kTrajectoryGap: return "TrajectoryGap";
    case ErrorCode::kInsufficientIdleFrames: return "InsufficientIdleFrames";
    case ErrorCode::kOutOfOrderTimestamp: return "OutOfOrderTimestamp";
    case ErrorCode::kNonPositiveProximity: return "NonPositiveProximity";
    case ErrorCode::kEmptyTrace: return "EmptyTrace";
    case ErrorCode::kSegmentationFailure: return "SegmentationFailure";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kNoModelLoaded: return "NoModelLoaded";
    case ErrorCode::kMalformedMessage: return "MalformedMessage";
    case ErrorCode::kPayloadSizeMismatch: return "PayloadSizeMismatch";
  }
  return "Unknown";
}

}  // namespace airpad
