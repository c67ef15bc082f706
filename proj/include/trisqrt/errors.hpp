#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trisqrt {

enum class ErrorCode {
  InvalidArgument,
  NotOrdinary,
  NonSplitField,
  RingMismatch,
  InsufficientPrecision,
  PrecisionExhausted,
  DivisionByNonUnit,
  SingularSystem,
  WeightTooSmall,
  IrreducibleDegreeTooHigh,
  ClosureViolation,
  Unsupported,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotOrdinary: return "NotOrdinary";
    case ErrorCode::NonSplitField: return "NonSplitField";
    case ErrorCode::RingMismatch: return "RingMismatch";
    case ErrorCode::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::DivisionByNonUnit: return "DivisionByNonUnit";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::WeightTooSmall: return "WeightTooSmall";
    case ErrorCode::IrreducibleDegreeTooHigh: return "IrreducibleDegreeTooHigh";
    case ErrorCode::ClosureViolation: return "ClosureViolation";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace trisqrt
