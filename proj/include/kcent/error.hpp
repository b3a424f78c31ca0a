#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kcent {

enum class ErrorCode {
  NonPositiveWeight,
  SelfLoop,
  EmptyGraph,
  ThetaOutOfRange,
  EpsilonOutOfRange,
  UnknownEdge,
  DimensionCap,
  DimensionMismatch,
  Disconnected,
  EmptyRetainSet,
  NoConvergence,
  BadSpectrumBound,
  SpectrumViolation,
  WeightsOutOfRange,
  SameVertex,
  CoverageViolation,
  DenominatorUnderflow,
  ParseError,
  DuplicateNodeId,
  EmptyInput,
  ZeroMean,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace kcent
