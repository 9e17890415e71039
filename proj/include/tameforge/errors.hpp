#pragma once

#include <stdexcept>
#include <string>

namespace tameforge {

/// Machine-readable failure categories shared by every module.
enum class ErrorCode {
  SpecMismatch,
  Undecidable,
  BoundExceeded,
  NotADomain,
  FrameMismatch,
  NotQAlgebra,
  DimensionMismatch,
  NotOriginPreserving,
  UnsupportedHom,
  IdealSquareNonzero,
  NotSquareZero,
  JacobianNotOne,
  NotDivisible,
  OrderBoundViolated,
  NInsufficient,
  NotLocalOrField,
  SingularMatrix,
  HypothesisFailed,
  NotAnAutomorphism,
  BaseFactorFailed,
  NotArtinianSupported,
  LiftMismatch,
  DepthCapExceeded,
  ProductNotIdentity,
  ParseError,
  IdentityFailed,
};

const char* error_code_name(ErrorCode code);

class TameError : public std::runtime_error {
 public:
  TameError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by shorten_step and the locmod pipeline; carries the smallest N that would work.
class NInsufficientError : public TameError {
 public:
  NInsufficientError(unsigned required, const std::string& what)
      : TameError(ErrorCode::NInsufficient, what), required_(required) {}

  unsigned required() const { return required_; }

 private:
  unsigned required_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw TameError(code, what); }

}  // namespace tameforge
