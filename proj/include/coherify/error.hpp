#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coherify {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  InvalidState,
  NotTracePreserving,
  NotCompletelyPositive,
  InvalidTransitionMatrix,
  NotUnistochastic,
  UndefinedAlpha,
  FamilyMismatch,
  NotBistochastic,
  ConvergenceFailure,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::NotTracePreserving: return "NotTracePreserving";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::InvalidTransitionMatrix: return "InvalidTransitionMatrix";
    case ErrorKind::NotUnistochastic: return "NotUnistochastic";
    case ErrorKind::UndefinedAlpha: return "UndefinedAlpha";
    case ErrorKind::FamilyMismatch: return "FamilyMismatch";
    case ErrorKind::NotBistochastic: return "NotBistochastic";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
  }
  return "Unknown";
}

}  // namespace coherify
