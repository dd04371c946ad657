#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critsat {

enum class ErrorKind {
  VariableOrderViolation,
  DuplicateVariable,
  VariableOutOfRange,
  InconsistentFixedSet,
  LengthMismatch,
  SyntaxError,
  ClauseWidthError,
  TooLarge,
  InvalidSpec,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::VariableOrderViolation: return "VariableOrderViolation";
    case ErrorKind::DuplicateVariable: return "DuplicateVariable";
    case ErrorKind::VariableOutOfRange: return "VariableOutOfRange";
    case ErrorKind::InconsistentFixedSet: return "InconsistentFixedSet";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ClauseWidthError: return "ClauseWidthError";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the kinds above so
// callers (tests, the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace critsat
