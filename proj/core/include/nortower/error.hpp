#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nortower {

enum class ErrorKind {
  EmptyPoset,
  CycleDetected,
  DuplicateElement,
  UnknownElement,
  ParseError,
  UniverseTooLarge,
  IndexOutOfRange,
  UniverseMismatch,
  NotConjClosed,
  NotEnumerable,
  StepLimitExceeded,
  ArityTooLarge,
  ArityMismatch,
  UnrealizableType,
  SearchBudgetExceeded,
  TypeNotRealizedInTable,
  NotDirected,
  IncoherentProjection,
  PartialOnNice,
  NodeNotBelow,
  NotAProperIdeal,
  PaddingOverflow,
  InvalidArgument,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace nortower
