#include "rangevol/error.hpp"

namespace rangevol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::EnvelopeViolation: return "EnvelopeViolation";
    case ErrorCode::NonMonotonicDates: return "NonMonotonicDates";
    case ErrorCode::MonthGap: return "MonthGap";
    case ErrorCode::NonPositiveShape: return "NonPositiveShape";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidD: return "InvalidD";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::InadmissibleParams: return "InadmissibleParams";
    case ErrorCode::NonFiniteVariance: return "NonFiniteVariance";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NoAdmissibleStart: return "NoAdmissibleStart";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::MissingOvernight: return "MissingOvernight";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateMonth: return "DuplicateMonth";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace rangevol
