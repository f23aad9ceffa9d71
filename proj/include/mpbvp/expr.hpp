#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpbvp/errors.hpp"

namespace mpbvp {

/// Parsed scalar expression over a fixed set of variable names.
///
/// Grammar (infix, whitespace insignificant):
///   expression := term    { ('+'|'-') term }          left associative
///   term       := unary   { ('*'|'/') unary }         left associative
///   unary      := '-' unary | power
///   power      := primary [ '^' unary ]               right associative
///   primary    := NUMBER | IDENT | IDENT '(' expression ')' | '(' expression ')'
///
/// Functions: sin cos exp log sqrt abs tanh, all unary.
/// Evaluation is IEEE double and rejects non-finite intermediates.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view source,
                    std::span<const std::string> variables);

  /// Evaluate with values aligned to the declared variable list.
  double eval(std::span<const double> values) const;

  /// Evaluate with a named environment; every referenced variable must be
  /// bound.
  double eval(const std::map<std::string, double>& env) const;

  /// Fully parenthesized rendering; reparses to a structurally identical tree.
  std::string to_string() const;

  bool same_structure(const Expr& other) const;

  bool references(std::string_view variable) const;
  const std::vector<std::string>& variables() const { return *vars_; }
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t {
    Constant,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Tanh,
  };

  struct Node {
    Op op;
    double value = 0.0;  // Constant
    int var = -1;        // Variable: index into the declared names
    int lhs = -1;
    int rhs = -1;
  };

  friend class ExprParser;

  // Children always precede parents, so evaluation is a single forward pass.
  std::vector<Node> nodes_;
  std::shared_ptr<const std::vector<std::string>> vars_;
};

}  // namespace mpbvp
