#include "mpbvp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace mpbvp {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view src, std::span<const std::string> variables)
      : src_(src) {
    auto names = std::make_shared<std::vector<std::string>>(variables.begin(),
                                                            variables.end());
    out_.vars_ = names;
  }

  Expr run() {
    if (src_.empty()) throw ParseError(ErrorCode::SyntaxError, "empty expression", 0);
    int root = expression();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(ErrorCode::SyntaxError, "unexpected trailing input", pos_);
    (void)root;
    return std::move(out_);
  }

 private:
  using Op = Expr::Op;

  int expression() {
    int lhs = term();
    for (;;) {
      skip_ws();
      if (accept('+')) lhs = binary(Op::Add, lhs, term());
      else if (accept('-')) lhs = binary(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      skip_ws();
      if (accept('*')) lhs = binary(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = binary(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  int unary() {
    skip_ws();
    if (accept('-')) {
      int child = unary();
      return add_node({Op::Neg, 0.0, -1, child, -1});
    }
    return power();
  }

  int power() {
    int base = primary();
    skip_ws();
    if (accept('^')) return binary(Op::Pow, base, unary());
    return base;
  }

  int primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(ErrorCode::SyntaxError, "unexpected end of expression", pos_);
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    throw ParseError(ErrorCode::SyntaxError,
                     std::string("unexpected character '") + c + "'", pos_);
  }

  int number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && src_[start] == '.'))
      throw ParseError(ErrorCode::SyntaxError, "malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // the 'e' belongs to something else
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
      throw ParseError(ErrorCode::SyntaxError, "malformed number", start);
    if (!std::isfinite(v))
      throw ParseError(ErrorCode::SyntaxError, "numeric literal out of range", start);
    return add_node({Op::Constant, v, -1, -1, -1});
  }

  int identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      Op op;
      if (name == "sin") op = Op::Sin;
      else if (name == "cos") op = Op::Cos;
      else if (name == "exp") op = Op::Exp;
      else if (name == "log") op = Op::Log;
      else if (name == "sqrt") op = Op::Sqrt;
      else if (name == "abs") op = Op::Abs;
      else if (name == "tanh") op = Op::Tanh;
      else
        throw ParseError(ErrorCode::UnknownFunction,
                         "unknown function '" + name + "'", start);
      ++pos_;
      int arg = expression();
      expect(')');
      return add_node({op, 0.0, -1, arg, -1});
    }
    const auto& vars = *out_.vars_;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i] == name)
        return add_node({Op::Variable, 0.0, static_cast<int>(i), -1, -1});
    }
    throw ParseError(ErrorCode::UnknownIdentifier,
                     "unknown identifier '" + name + "'", start);
  }

  int binary(Op op, int lhs, int rhs) { return add_node({op, 0.0, -1, lhs, rhs}); }

  int add_node(Expr::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!accept(c))
      throw ParseError(ErrorCode::SyntaxError,
                       std::string("expected '") + c + "'", pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Expr out_;
};

Expr Expr::parse(std::string_view source, std::span<const std::string> variables) {
  return ExprParser(source, variables).run();
}

double Expr::eval(std::span<const double> values) const {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidInput, "empty expression");
  thread_local std::vector<double> stack;
  stack.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    double v = 0.0;
    switch (n.op) {
      case Op::Constant: v = n.value; break;
      case Op::Variable:
        if (n.var < 0 || static_cast<std::size_t>(n.var) >= values.size())
          throw Error(ErrorCode::UnboundVariable,
                      "no value bound for variable '" + (*vars_)[n.var] + "'");
        v = values[n.var];
        break;
      case Op::Neg: v = -stack[n.lhs]; break;
      case Op::Add: v = stack[n.lhs] + stack[n.rhs]; break;
      case Op::Sub: v = stack[n.lhs] - stack[n.rhs]; break;
      case Op::Mul: v = stack[n.lhs] * stack[n.rhs]; break;
      case Op::Div: v = stack[n.lhs] / stack[n.rhs]; break;
      case Op::Pow: {
        double b = stack[n.lhs], e = stack[n.rhs];
        if (b < 0.0 && e != std::rint(e))
          throw Error(ErrorCode::EvalDomain,
                      "negative base with non-integer exponent");
        v = std::pow(b, e);
        break;
      }
      case Op::Sin: v = std::sin(stack[n.lhs]); break;
      case Op::Cos: v = std::cos(stack[n.lhs]); break;
      case Op::Exp: v = std::exp(stack[n.lhs]); break;
      case Op::Log: v = std::log(stack[n.lhs]); break;
      case Op::Sqrt: v = std::sqrt(stack[n.lhs]); break;
      case Op::Abs: v = std::fabs(stack[n.lhs]); break;
      case Op::Tanh: v = std::tanh(stack[n.lhs]); break;
    }
    if (!std::isfinite(v))
      throw Error(ErrorCode::EvalDomain, "non-finite value in '" + to_string() + "'");
    stack[i] = v;
  }
  return stack.back();
}

double Expr::eval(const std::map<std::string, double>& env) const {
  std::vector<double> values(vars_->size(), 0.0);
  for (std::size_t i = 0; i < vars_->size(); ++i) {
    auto it = env.find((*vars_)[i]);
    if (it != env.end()) {
      values[i] = it->second;
    } else if (references((*vars_)[i])) {
      throw Error(ErrorCode::UnboundVariable,
                  "no value bound for variable '" + (*vars_)[i] + "'");
    }
  }
  return eval(values);
}

std::string Expr::to_string() const {
  if (nodes_.empty()) return "";
  std::vector<std::string> text(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Constant: text[i] = format_double(n.value); break;
      case Op::Variable: text[i] = (*vars_)[n.var]; break;
      case Op::Neg: text[i] = "(-" + text[n.lhs] + ")"; break;
      case Op::Add: text[i] = "(" + text[n.lhs] + "+" + text[n.rhs] + ")"; break;
      case Op::Sub: text[i] = "(" + text[n.lhs] + "-" + text[n.rhs] + ")"; break;
      case Op::Mul: text[i] = "(" + text[n.lhs] + "*" + text[n.rhs] + ")"; break;
      case Op::Div: text[i] = "(" + text[n.lhs] + "/" + text[n.rhs] + ")"; break;
      case Op::Pow: text[i] = "(" + text[n.lhs] + "^" + text[n.rhs] + ")"; break;
      case Op::Sin: text[i] = "sin(" + text[n.lhs] + ")"; break;
      case Op::Cos: text[i] = "cos(" + text[n.lhs] + ")"; break;
      case Op::Exp: text[i] = "exp(" + text[n.lhs] + ")"; break;
      case Op::Log: text[i] = "log(" + text[n.lhs] + ")"; break;
      case Op::Sqrt: text[i] = "sqrt(" + text[n.lhs] + ")"; break;
      case Op::Abs: text[i] = "abs(" + text[n.lhs] + ")"; break;
      case Op::Tanh: text[i] = "tanh(" + text[n.lhs] + ")"; break;
    }
  }
  return text.back();
}

bool Expr::same_structure(const Expr& other) const {
  // Compare recursively from the roots; node order may differ between
  // structurally identical trees built in different parse orders.
  struct Cmp {
    const std::vector<Node>& a;
    const std::vector<Node>& b;
    bool eq(int ia, int ib) const {
      const Node& x = a[ia];
      const Node& y = b[ib];
      if (x.op != y.op) return false;
      switch (x.op) {
        case Op::Constant: return x.value == y.value;
        case Op::Variable: return x.var == y.var;
        default: break;
      }
      if ((x.lhs >= 0) != (y.lhs >= 0)) return false;
      if ((x.rhs >= 0) != (y.rhs >= 0)) return false;
      if (x.lhs >= 0 && !eq(x.lhs, y.lhs)) return false;
      if (x.rhs >= 0 && !eq(x.rhs, y.rhs)) return false;
      return true;
    }
  };
  if (nodes_.empty() || other.nodes_.empty()) return nodes_.empty() && other.nodes_.empty();
  return Cmp{nodes_, other.nodes_}.eq(static_cast<int>(nodes_.size()) - 1,
                                      static_cast<int>(other.nodes_.size()) - 1);
}

bool Expr::references(std::string_view variable) const {
  for (const Node& n : nodes_) {
    if (n.op == Op::Variable && (*vars_)[n.var] == variable) return true;
  }
  return false;
}

}  // namespace mpbvp
