#pragma once

#include <stdexcept>
#include <string>

namespace hjk {

enum class ErrorCode {
  InvalidMapping,
  DegenerateMapping,
  InsufficientStencil,
  UnderResolvedSegment,
  IllConditionedBasis,
  InconsistentWeights,
  SingularSystem,
  InvalidParameter,
  IncompleteClosure,
  Shape,
  InvalidRange,
  InvalidOrder,
  InvalidSpeed,
  Divergence,
  UnknownProblem,
  Config,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-checkable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hjk
