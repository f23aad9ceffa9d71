#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpbvp/expr.hpp"
#include "mpbvp/mat.hpp"

namespace mpbvp {

/// Matrix whose entries are expressions in t (and eps when declared).
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(int rows, int cols, std::vector<Expr> entries);

  Mat eval(std::span<const double> env) const;
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }
  const Expr& entry(int i, int j) const { return entries_[static_cast<std::size_t>(i) * cols_ + j]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Expr> entries_;
};

/// Vector of expressions; quasi-linear entries may also reference x1..xn.
class ExprVector {
 public:
  ExprVector() = default;
  explicit ExprVector(std::vector<Expr> entries) : entries_(std::move(entries)) {}

  std::vector<double> eval(std::span<const double> env) const;
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const Expr& entry(int i) const { return entries_[i]; }

 private:
  std::vector<Expr> entries_;
};

struct BoundaryPoint {
  double t = 0.0;
  Mat f;  // the constant matrix weighting x(t) in the boundary functional
};

enum class ProblemMode { Linear, QuasiLinear };

/// Many-point boundary value problem on [0,1]:
///   x' = A(t) x + f(t)        (linear)
///   x' = A(t) x + f(x, t)     (quasi-linear)
///   eps x' = A(t,eps) x + f(t,eps)   when eps is set
/// subject to  sum_j F_j x(t_j) = alpha.
///
/// A and f may be given as series terms; A(t,eps) = sum_k A_k(t) eps^k,
/// truncated at the supplied order, and likewise for f.
///
/// Environment layout: matrix entries see {t, eps}; forcing entries see
/// {t, eps, x1..xn} (the state slots are bound only in quasi-linear mode).
struct BvpProblem {
  int n = 0;
  ProblemMode mode = ProblemMode::Linear;
  std::vector<ExprMatrix> a_terms;   // at least one
  std::vector<ExprVector> f_terms;   // at least one
  std::vector<BoundaryPoint> points;
  std::vector<double> alpha;
  std::optional<double> eps;
  std::optional<ExprMatrix> picard_base;     // optional B(t)
  std::optional<std::vector<Mat>> split;     // optional split from the file
  std::string source;                        // provenance for reports

  int boundary_count() const { return static_cast<int>(points.size()); }
  std::vector<double> anchors() const;

  Mat eval_system_matrix(double t) const;  // A(t) or the eps-series sum
  Mat eval_base_matrix(double t) const;    // B(t); requires picard_base
  std::vector<double> eval_forcing(double t) const;
  std::vector<double> eval_forcing(double t, std::span<const double> x) const;

  // leading and first-order series terms at eps = 0 (zero when absent)
  Mat eval_limit_matrix(double t) const;
  std::vector<double> eval_limit_forcing(double t) const;
  Mat eval_order1_matrix(double t) const;
  std::vector<double> eval_order1_forcing(double t) const;

  /// Structural validation; throws Error(InvalidInput) with a description.
  void validate() const;
};

/// Constant matrices P_1..P_m with sum P_k = I, defining the anchored pieces
/// of the particular solution.
class SplitScheme {
 public:
  static constexpr double kIdentityTolerance = 1e-14;

  static SplitScheme anchored_first(int n, int m);  // P_1 = I, rest zero
  static SplitScheme uniform(int n, int m);         // P_k = I/m
  static SplitScheme from_matrices(std::vector<Mat> parts, std::string name = "file");

  std::size_t size() const { return parts_.size(); }
  const Mat& operator[](std::size_t k) const { return parts_[k]; }
  const std::string& name() const { return name_; }
  std::vector<bool> nonzero_mask() const;

 private:
  SplitScheme(std::vector<Mat> parts, std::string name)
      : parts_(std::move(parts)), name_(std::move(name)) {}

  std::vector<Mat> parts_;
  std::string name_;
};

}  // namespace mpbvp
