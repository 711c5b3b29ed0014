#include "thinfilm/error.hpp"

namespace thinfilm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::ZeroDatum: return "ZeroDatum";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::AlphaBelowDepth: return "AlphaBelowDepth";
    case ErrorCode::NoCheckpoints: return "NoCheckpoints";
    case ErrorCode::DisjointRanges: return "DisjointRanges";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace thinfilm
