#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcell {

// Stable machine-readable codes; the CLI prints these verbatim.
enum class ErrorCode {
  kInvalidArgument,
  kInvalidLevel,
  kOutOfRange,
  kArithmeticOverflow,
  kResourceLimit,
  kUnsupportedParameters,
  kInfeasible,
  kBoundExceeded,
  kInvariantViolation,
  kExhausted,
  kCertificationFailed,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dcell
