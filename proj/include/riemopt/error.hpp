#pragma once

#include <stdexcept>
#include <string>

namespace riemopt {

enum class ErrorCode {
  DimensionMismatch,
  BaseMismatch,
  AntipodalOrOutOfDomain,
  SingularTransport,
  InvalidArgument,
  IndexOutOfRange,
  NonConvexDetected,
  NonFiniteObjective,
  DimensionTooLarge,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::AntipodalOrOutOfDomain: return "AntipodalOrOutOfDomain";
    case ErrorCode::SingularTransport: return "SingularTransport";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonConvexDetected: return "NonConvexDetected";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace riemopt
