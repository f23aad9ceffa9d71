#pragma once

#include <string>
#include <vector>

#include "mpbvp/problem.hpp"

namespace mpbvp::testing {

inline std::vector<std::string> matrix_vars() { return {"t", "eps"}; }

inline std::vector<std::string> forcing_vars(int n, bool quasilinear) {
  std::vector<std::string> vars{"t", "eps"};
  if (quasilinear)
    for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  return vars;
}

inline ExprMatrix expr_matrix(int n, const std::vector<std::string>& entries) {
  auto vars = matrix_vars();
  std::vector<Expr> parsed;
  for (const auto& s : entries) parsed.push_back(Expr::parse(s, vars));
  return ExprMatrix(n, n, std::move(parsed));
}

inline ExprVector expr_vector(int n, const std::vector<std::string>& entries,
                              bool quasilinear = false) {
  auto vars = forcing_vars(n, quasilinear);
  std::vector<Expr> parsed;
  for (const auto& s : entries) parsed.push_back(Expr::parse(s, vars));
  return ExprVector(std::move(parsed));
}

inline Mat mat(int n, std::vector<double> entries) {
  return Mat(n, n, std::move(entries));
}

/// scalar problem builder: x' = a(t) x + f(t), boundary sum_j w_j x(t_j) = alpha
inline BvpProblem scalar_problem(const std::string& a, const std::string& f,
                                 std::vector<std::pair<double, double>> points,
                                 double alpha) {
  BvpProblem p;
  p.n = 1;
  p.a_terms.push_back(expr_matrix(1, {a}));
  p.f_terms.push_back(expr_vector(1, {f}));
  for (auto [t, w] : points) p.points.push_back({t, mat(1, {w})});
  p.alpha = {alpha};
  return p;
}

}  // namespace mpbvp::testing
