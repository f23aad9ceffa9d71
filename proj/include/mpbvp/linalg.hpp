#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "mpbvp/mat.hpp"

namespace mpbvp {

using Complex = std::complex<double>;

/// LU factorization with partial (row) pivoting, PA = LU packed in place.
class LuFactor {
 public:
  static constexpr double kPivotFloor = 1e-300;

  /// Throws Error(SingularMatrix) when a pivot falls below kPivotFloor.
  static LuFactor factor(const Mat& m);

  double det() const;
  void solve_in_place(std::span<double> b) const;
  std::vector<double> solve(std::span<const double> b) const;
  Mat solve(const Mat& b) const;
  Mat inverse() const;
  int size() const { return lu_.rows(); }

 private:
  Mat lu_;
  std::vector<int> pivots_;
  int sign_ = 1;
};

struct LuSolveResult {
  Mat x;
  double det = 0.0;
};

/// Solve M X = B; also reports det M with the pivot sign tracked.
LuSolveResult lu_solve(const Mat& m, const Mat& b);
std::vector<double> lu_solve_vec(const Mat& m, std::span<const double> b);

/// Determinant via elimination; returns 0 instead of throwing on singularity.
double determinant(const Mat& m);

/// Estimate of 1/(norm1(M)*norm1(inv M)) in [0,1]; 0 for singular input.
double rcond_estimate(const Mat& m);

/// Eigenvalues of a real square matrix, complex spectrum allowed.
/// Balancing, reduction to upper Hessenberg form, then shifted QR iteration
/// (Francis double shift) without eigenvector accumulation.
std::vector<Complex> eigenvalues(const Mat& m);

}  // namespace mpbvp
