#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rangevol {

enum class ErrorCode {
  // series validation
  EmptySeries,
  NonPositivePrice,
  EnvelopeViolation,
  NonMonotonicDates,
  MonthGap,
  // distribution
  NonPositiveShape,
  ProbabilityOutOfRange,
  NoConvergence,
  // model
  InvalidD,
  NegativeWeight,
  InadmissibleParams,
  NonFiniteVariance,
  SeriesTooShort,
  NoAdmissibleStart,
  IndexOutOfRange,
  LengthMismatch,
  // estimators / indicators / detection
  InvalidConfig,
  WindowTooShort,
  MissingOvernight,
  EmptyInput,
  InsufficientHistory,
  // io
  ParseError,
  DuplicateMonth,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a stable, machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rangevol
