#include "mpbvp/mat.hpp"

#include <cmath>
#include <utility>

namespace mpbvp {

Mat::Mat(int rows, int cols)
    : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0)
    throw Error(ErrorCode::InvalidInput, "negative matrix dimension");
}

Mat::Mat(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (rows < 0 || cols < 0 ||
      a_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw Error(ErrorCode::InvalidInput, "matrix dimensions do not match entry count");
  if (!is_finite())
    throw Error(ErrorCode::InvalidInput, "matrix entries must be finite");
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::operator*(const Mat& rhs) const {
  if (cols_ != rhs.rows_)
    throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
  Mat out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  }
  return out;
}

Mat Mat::operator+(const Mat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix sum shape mismatch");
  Mat out = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
  return out;
}

Mat Mat::operator-(const Mat& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix difference shape mismatch");
  Mat out = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
  return out;
}

Mat Mat::scaled(double s) const {
  Mat out = *this;
  for (double& v : out.a_) v *= s;
  return out;
}

std::vector<double> Mat::mul_vec(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cols_)
    throw Error(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double Mat::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Mat::norm_one() const {
  double best = 0.0;
  for (int j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) s += std::fabs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double Mat::max_abs() const {
  double best = 0.0;
  for (double v : a_) best = std::max(best, std::fabs(v));
  return best;
}

bool Mat::is_zero() const {
  for (double v : a_)
    if (v != 0.0) return false;
  return true;
}

bool Mat::is_finite() const {
  for (double v : a_)
    if (!std::isfinite(v)) return false;
  return true;
}

double vec_norm_inf(std::span<const double> v) {
  double best = 0.0;
  for (double x : v) best = std::max(best, std::fabs(x));
  return best;
}

std::vector<double> vec_add(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

std::vector<double> vec_sub(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

std::vector<double> vec_scaled(std::span<const double> a, double s) {
  std::vector<double> out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

}  // namespace mpbvp
