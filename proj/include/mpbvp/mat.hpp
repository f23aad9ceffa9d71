#pragma once

#include <span>
#include <vector>

#include "mpbvp/errors.hpp"

namespace mpbvp {

/// Dense real matrix, row major. Sized for small systems (n up to ~50).
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols);  // zero filled
  Mat(int rows, int cols, std::vector<double> entries);  // validates finiteness

  static Mat identity(int n);

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::span<const double> data() const { return a_; }
  std::span<double> data() { return a_; }

  Mat operator*(const Mat& rhs) const;
  Mat operator+(const Mat& rhs) const;
  Mat operator-(const Mat& rhs) const;
  Mat scaled(double s) const;

  std::vector<double> mul_vec(std::span<const double> x) const;

  double norm_inf() const;  // max row sum
  double norm_one() const;  // max column sum
  double max_abs() const;
  bool is_zero() const;
  bool is_finite() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// small vector helpers shared across the solvers
double vec_norm_inf(std::span<const double> v);
std::vector<double> vec_add(std::span<const double> a, std::span<const double> b);
std::vector<double> vec_sub(std::span<const double> a, std::span<const double> b);
std::vector<double> vec_scaled(std::span<const double> a, double s);

}  // namespace mpbvp
