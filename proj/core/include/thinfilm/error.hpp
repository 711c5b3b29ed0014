#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thinfilm {

enum class ErrorCode {
  InvalidDomain,
  ZeroDatum,
  NonFinite,
  SizeMismatch,
  Overflow,
  ZeroField,
  EmptyTrajectory,
  TooFewSamples,
  EpsilonOutOfRange,
  ConfigInvalid,
  InsufficientTail,
  AlphaBelowDepth,
  NoCheckpoints,
  DisjointRanges,
  LinearSolveFailure,
  InvalidDescriptor,
  InvariantViolation,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the integrator and the CLI) can dispatch on the cause.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thinfilm
