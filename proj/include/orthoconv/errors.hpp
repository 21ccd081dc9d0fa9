#pragma once

#include <stdexcept>
#include <string>

namespace orthoconv {

/// Error identities thrown by the library. Every throw site uses one of
/// these codes so callers can branch on the failure kind instead of
/// parsing messages.
enum class ErrorCode {
  BadDimensionality,
  NonPositiveDim,
  EvenKernel,
  InvalidArchitecture,
  NoOrthogonalLayer,
  EmptyVector,
  KernelTooLarge,
  KernelTooSmall,
  UnsupportedStride,
  SignalTooSmall,
  DimensionMismatch,
  MatrixTooLarge,
  StrideNotOne,
  ZeroOperator,
  WrongCase,
  WrongPadding,
  ShapeMismatch,
  InvalidRuns,
  ContractViolation,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadDimensionality: return "BadDimensionality";
    case ErrorCode::NonPositiveDim: return "NonPositiveDim";
    case ErrorCode::EvenKernel: return "EvenKernel";
    case ErrorCode::InvalidArchitecture: return "InvalidArchitecture";
    case ErrorCode::NoOrthogonalLayer: return "NoOrthogonalLayer";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::KernelTooLarge: return "KernelTooLarge";
    case ErrorCode::KernelTooSmall: return "KernelTooSmall";
    case ErrorCode::UnsupportedStride: return "UnsupportedStride";
    case ErrorCode::SignalTooSmall: return "SignalTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MatrixTooLarge: return "MatrixTooLarge";
    case ErrorCode::StrideNotOne: return "StrideNotOne";
    case ErrorCode::ZeroOperator: return "ZeroOperator";
    case ErrorCode::WrongCase: return "WrongCase";
    case ErrorCode::WrongPadding: return "WrongPadding";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidRuns: return "InvalidRuns";
    case ErrorCode::ContractViolation: return "ContractViolation";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace orthoconv
