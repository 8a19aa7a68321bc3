#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace penny {

enum class ErrorCode {
  kZeroLengthGame,
  kInvalidDiscount,
  kInvalidParameter,
  kBudgetViolation,
  kInadmissibleGamma,
  kSeedSpaceTooLarge,
  kInconsistentObservation,
  kTreeTooLarge,
  kHorizonExceeded,
  kNotBijective,
  kLengthMismatch,
  kMalformedDescriptor,
  kNotOblivious,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroLengthGame: return "zero_length_game";
    case ErrorCode::kInvalidDiscount: return "invalid_discount";
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kBudgetViolation: return "budget_violation";
    case ErrorCode::kInadmissibleGamma: return "inadmissible_gamma";
    case ErrorCode::kSeedSpaceTooLarge: return "seed_space_too_large";
    case ErrorCode::kInconsistentObservation: return "inconsistent_observation";
    case ErrorCode::kTreeTooLarge: return "tree_too_large";
    case ErrorCode::kHorizonExceeded: return "horizon_exceeded";
    case ErrorCode::kNotBijective: return "not_bijective";
    case ErrorCode::kLengthMismatch: return "length_mismatch";
    case ErrorCode::kMalformedDescriptor: return "malformed_descriptor";
    case ErrorCode::kNotOblivious: return "not_oblivious";
  }
  return "unknown";
}

/// Every failure in the library is reported as a penny::Error carrying a
/// machine-readable code; what() starts with the canonical short message
/// ("budget violation", "seed space too large", ...).
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

}  // namespace penny
