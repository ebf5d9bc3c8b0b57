#include "nortower/error.hpp"

namespace nortower {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyPoset: return "EmptyPoset";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::DuplicateElement: return "DuplicateElement";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UniverseTooLarge: return "UniverseTooLarge";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UniverseMismatch: return "UniverseMismatch";
    case ErrorKind::NotConjClosed: return "NotConjClosed";
    case ErrorKind::NotEnumerable: return "NotEnumerable";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::ArityTooLarge: return "ArityTooLarge";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UnrealizableType: return "UnrealizableType";
    case ErrorKind::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorKind::TypeNotRealizedInTable: return "TypeNotRealizedInTable";
    case ErrorKind::NotDirected: return "NotDirected";
    case ErrorKind::IncoherentProjection: return "IncoherentProjection";
    case ErrorKind::PartialOnNice: return "PartialOnNice";
    case ErrorKind::NodeNotBelow: return "NodeNotBelow";
    case ErrorKind::NotAProperIdeal: return "NotAProperIdeal";
    case ErrorKind::PaddingOverflow: return "PaddingOverflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace nortower
