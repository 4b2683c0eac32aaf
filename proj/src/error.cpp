#include "dcell/error.hpp"

namespace dcell {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidLevel: return "invalid_level";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kArithmeticOverflow: return "arithmetic_overflow";
    case ErrorCode::kResourceLimit: return "resource_limit";
    case ErrorCode::kUnsupportedParameters: return "unsupported_parameters";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kBoundExceeded: return "bound_exceeded";
    case ErrorCode::kInvariantViolation: return "invariant_violation";
    case ErrorCode::kExhausted: return "exhausted";
    case ErrorCode::kCertificationFailed: return "certification_failed";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace dcell
