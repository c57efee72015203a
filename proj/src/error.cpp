#include "hjk/error.hpp"

namespace hjk {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMapping: return "invalid-mapping";
    case ErrorCode::DegenerateMapping: return "degenerate-mapping";
    case ErrorCode::InsufficientStencil: return "insufficient-stencil";
    case ErrorCode::UnderResolvedSegment: return "under-resolved-segment";
    case ErrorCode::IllConditionedBasis: return "ill-conditioned-basis";
    case ErrorCode::InconsistentWeights: return "inconsistent-weights";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::IncompleteClosure: return "incomplete-closure";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::InvalidRange: return "invalid-range";
    case ErrorCode::InvalidOrder: return "invalid-order";
    case ErrorCode::InvalidSpeed: return "invalid-speed";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::UnknownProblem: return "unknown-problem";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "error";
}

}  // namespace hjk
