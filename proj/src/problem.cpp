#include "mpbvp/problem.hpp"

#include <array>
#include <cmath>

namespace mpbvp {

ExprMatrix::ExprMatrix(int rows, int cols, std::vector<Expr> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw Error(ErrorCode::InvalidInput, "expression matrix shape mismatch");
}

Mat ExprMatrix::eval(std::span<const double> env) const {
  Mat m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = entry(i, j).eval(env);
  return m;
}

std::vector<double> ExprVector::eval(std::span<const double> env) const {
  std::vector<double> out(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = entries_[i].eval(env);
  return out;
}

std::vector<double> BvpProblem::anchors() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.t);
  return out;
}

namespace {

// env for matrix entries: {t, eps}
std::array<double, 2> matrix_env(double t, const std::optional<double>& eps) {
  return {t, eps.value_or(0.0)};
}

}  // namespace

Mat BvpProblem::eval_system_matrix(double t) const {
  auto env = matrix_env(t, eps);
  Mat sum = a_terms[0].eval(env);
  double ek = 1.0;
  for (std::size_t k = 1; k < a_terms.size(); ++k) {
    ek *= eps.value_or(0.0);
    if (ek == 0.0) break;
    sum = sum + a_terms[k].eval(env).scaled(ek);
  }
  return sum;
}

Mat BvpProblem::eval_base_matrix(double t) const {
  if (!picard_base)
    throw Error(ErrorCode::InvalidInput, "problem has no base matrix B");
  auto env = matrix_env(t, eps);
  return picard_base->eval(env);
}

std::vector<double> BvpProblem::eval_forcing(double t) const {
  std::vector<double> env(2 + n, 0.0);
  env[0] = t;
  env[1] = eps.value_or(0.0);
  std::vector<double> sum = f_terms[0].eval(env);
  double ek = 1.0;
  for (std::size_t k = 1; k < f_terms.size(); ++k) {
    ek *= eps.value_or(0.0);
    if (ek == 0.0) break;
    auto term = f_terms[k].eval(env);
    for (int i = 0; i < n; ++i) sum[i] += ek * term[i];
  }
  return sum;
}

std::vector<double> BvpProblem::eval_forcing(double t, std::span<const double> x) const {
  std::vector<double> env(2 + n, 0.0);
  env[0] = t;
  env[1] = eps.value_or(0.0);
  for (int i = 0; i < n; ++i) env[2 + i] = x[i];
  std::vector<double> sum = f_terms[0].eval(env);
  double ek = 1.0;
  for (std::size_t k = 1; k < f_terms.size(); ++k) {
    ek *= eps.value_or(0.0);
    if (ek == 0.0) break;
    auto term = f_terms[k].eval(env);
    for (int i = 0; i < n; ++i) sum[i] += ek * term[i];
  }
  return sum;
}

Mat BvpProblem::eval_limit_matrix(double t) const {
  std::array<double, 2> env{t, 0.0};
  return a_terms[0].eval(env);
}

std::vector<double> BvpProblem::eval_limit_forcing(double t) const {
  std::vector<double> env(2 + n, 0.0);
  env[0] = t;
  return f_terms[0].eval(env);
}

Mat BvpProblem::eval_order1_matrix(double t) const {
  if (a_terms.size() < 2) return Mat(n, n);
  std::array<double, 2> env{t, 0.0};
  return a_terms[1].eval(env);
}

std::vector<double> BvpProblem::eval_order1_forcing(double t) const {
  if (f_terms.size() < 2) return std::vector<double>(n, 0.0);
  std::vector<double> env(2 + n, 0.0);
  env[0] = t;
  return f_terms[1].eval(env);
}

void BvpProblem::validate() const {
  if (n <= 0) throw Error(ErrorCode::InvalidInput, "state dimension must be positive");
  if (a_terms.empty() || f_terms.empty())
    throw Error(ErrorCode::InvalidInput, "system matrix and forcing are required");
  for (const auto& term : a_terms)
    if (term.rows() != n || term.cols() != n)
      throw Error(ErrorCode::InvalidInput, "system matrix term must be n x n");
  for (const auto& term : f_terms)
    if (term.size() != n)
      throw Error(ErrorCode::InvalidInput, "forcing term must have n entries");
  if (static_cast<int>(alpha.size()) != n)
    throw Error(ErrorCode::InvalidInput, "alpha must have n entries");
  for (double v : alpha)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "alpha must be finite");
  if (points.empty())
    throw Error(ErrorCode::InvalidInput, "at least one boundary point is required");
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto& p = points[j];
    if (!(p.t >= 0.0 && p.t <= 1.0))
      throw Error(ErrorCode::InvalidInput, "boundary abscissa outside [0,1]");
    if (j > 0 && !(p.t > points[j - 1].t))
      throw Error(ErrorCode::InvalidInput, "boundary abscissas must increase strictly");
    if (p.f.rows() != n || p.f.cols() != n)
      throw Error(ErrorCode::InvalidInput, "boundary matrix must be n x n");
  }
  if (points.size() >= 2) {
    if (std::fabs(points.front().t) > 1e-12)
      throw Error(ErrorCode::InvalidInput, "first boundary point must be t = 0");
    if (std::fabs(points.back().t - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidInput, "last boundary point must be t = 1");
  }
  if (eps && !(*eps > 0.0))
    throw Error(ErrorCode::InvalidInput, "eps must be positive");
  if (picard_base && (picard_base->rows() != n || picard_base->cols() != n))
    throw Error(ErrorCode::InvalidInput, "base matrix B must be n x n");
  if (split) {
    if (split->size() != points.size())
      throw Error(ErrorCode::InvalidInput, "split must provide one matrix per boundary point");
    for (const Mat& p : *split)
      if (p.rows() != n || p.cols() != n)
        throw Error(ErrorCode::InvalidInput, "split matrices must be n x n");
  }
}

SplitScheme SplitScheme::anchored_first(int n, int m) {
  std::vector<Mat> parts;
  parts.reserve(m);
  parts.push_back(Mat::identity(n));
  for (int k = 1; k < m; ++k) parts.emplace_back(n, n);
  return SplitScheme(std::move(parts), "default");
}

SplitScheme SplitScheme::uniform(int n, int m) {
  std::vector<Mat> parts;
  parts.reserve(m);
  for (int k = 0; k < m; ++k) parts.push_back(Mat::identity(n).scaled(1.0 / m));
  return SplitScheme(std::move(parts), "uniform");
}

SplitScheme SplitScheme::from_matrices(std::vector<Mat> parts, std::string name) {
  if (parts.empty())
    throw Error(ErrorCode::InvalidInput, "split needs at least one matrix");
  const int n = parts.front().rows();
  Mat sum(n, n);
  for (const Mat& p : parts) {
    if (p.rows() != n || p.cols() != n)
      throw Error(ErrorCode::InvalidInput, "split matrices must share one shape");
    sum = sum + p;
  }
  Mat defect = sum - Mat::identity(n);
  if (defect.max_abs() > kIdentityTolerance)
    throw Error(ErrorCode::InvalidInput, "split matrices must sum to the identity");
  return SplitScheme(std::move(parts), std::move(name));
}

std::vector<bool> SplitScheme::nonzero_mask() const {
  std::vector<bool> mask(parts_.size());
  for (std::size_t k = 0; k < parts_.size(); ++k) mask[k] = !parts_[k].is_zero();
  return mask;
}

}  // namespace mpbvp
