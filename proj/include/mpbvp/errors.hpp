#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpbvp {

enum class ErrorCode {
  InvalidInput,
  SyntaxError,
  UnknownIdentifier,
  UnknownFunction,
  UnboundVariable,
  EvalDomain,
  SingularMatrix,
  NumericalFailure,
  StiffnessFailure,
  IllPosed,
  Diverged,
  NonFiniteRhs,
  InsufficientData,
  DimensionMismatch,
  AnchorOffGrid,
  OuterUndefined,
  EpsilonTooSmall,
  IoError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception: a code for programmatic handling plus a message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Expression parse failure; carries the byte offset into the source string.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, std::size_t offset)
      : Error(code, message + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Integration gave up: step size underflow or step cap exceeded.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& message, double t_reached)
      : Error(ErrorCode::StiffnessFailure, message), t_reached_(t_reached) {}

  double t_reached() const noexcept { return t_reached_; }

 private:
  double t_reached_;
};

/// Boundary matrix F failed the solvability test; keeps the diagnostics.
class IllPosedError : public Error {
 public:
  IllPosedError(const std::string& message, double det_f, double rcond_f,
                std::vector<double> det_fj)
      : Error(ErrorCode::IllPosed, message),
        det_f_(det_f),
        rcond_f_(rcond_f),
        det_fj_(std::move(det_fj)) {}

  double det_f() const noexcept { return det_f_; }
  double rcond_f() const noexcept { return rcond_f_; }
  const std::vector<double>& det_fj() const noexcept { return det_fj_; }

 private:
  double det_f_;
  double rcond_f_;
  std::vector<double> det_fj_;
};

}  // namespace mpbvp
