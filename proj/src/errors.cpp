#include "mpbvp/errors.hpp"

namespace mpbvp {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::UnknownIdentifier: return "unknown_identifier";
    case ErrorCode::UnknownFunction: return "unknown_function";
    case ErrorCode::UnboundVariable: return "unbound_variable";
    case ErrorCode::EvalDomain: return "eval_domain";
    case ErrorCode::SingularMatrix: return "singular_matrix";
    case ErrorCode::NumericalFailure: return "numerical_failure";
    case ErrorCode::StiffnessFailure: return "stiffness_failure";
    case ErrorCode::IllPosed: return "ill_posed";
    case ErrorCode::Diverged: return "diverged";
    case ErrorCode::NonFiniteRhs: return "non_finite_rhs";
    case ErrorCode::InsufficientData: return "insufficient_data";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::AnchorOffGrid: return "anchor_off_grid";
    case ErrorCode::OuterUndefined: return "outer_undefined";
    case ErrorCode::EpsilonTooSmall: return "epsilon_too_small";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

}  // namespace mpbvp
