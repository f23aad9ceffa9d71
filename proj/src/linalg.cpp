#include "mpbvp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpbvp {

namespace {

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": square matrix required");
}

}  // namespace

LuFactor LuFactor::factor(const Mat& m) {
  require_square(m, "lu");
  const int n = m.rows();
  LuFactor f;
  f.lu_ = m;
  f.pivots_.resize(n);
  Mat& a = f.lu_;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < kPivotFloor)
      throw Error(ErrorCode::SingularMatrix, "matrix is singular to working precision");
    f.pivots_[k] = piv;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      f.sign_ = -f.sign_;
    }
    const double inv_pivot = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      double l = a(i, k) * inv_pivot;
      a(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return f;
}

double LuFactor::det() const {
  double d = sign_;
  for (int i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
  return d;
}

void LuFactor::solve_in_place(std::span<double> b) const {
  const int n = lu_.rows();
  if (static_cast<int>(b.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "lu solve: rhs length mismatch");
  // stored multipliers are in final row order, so permute first
  for (int k = 0; k < n; ++k)
    if (pivots_[k] != k) std::swap(b[k], b[pivots_[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * b[j];
    b[i] = s / lu_(i, i);
  }
}

std::vector<double> LuFactor::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Mat LuFactor::solve(const Mat& b) const {
  const int n = lu_.rows();
  if (b.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "lu solve: rhs row count mismatch");
  Mat x = b;
  std::vector<double> col(n);
  for (int j = 0; j < b.cols(); ++j) {
    for (int i = 0; i < n; ++i) col[i] = b(i, j);
    solve_in_place(col);
    for (int i = 0; i < n; ++i) x(i, j) = col[i];
  }
  return x;
}

Mat LuFactor::inverse() const { return solve(Mat::identity(lu_.rows())); }

LuSolveResult lu_solve(const Mat& m, const Mat& b) {
  LuFactor f = LuFactor::factor(m);
  return {f.solve(b), f.det()};
}

std::vector<double> lu_solve_vec(const Mat& m, std::span<const double> b) {
  return LuFactor::factor(m).solve(b);
}

double determinant(const Mat& m) {
  require_square(m, "determinant");
  const int n = m.rows();
  Mat a = m;
  double sign = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      double l = a(i, k) / a(k, k);
      for (int j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  double d = sign;
  for (int i = 0; i < n; ++i) d *= a(i, i);
  return d;
}

double rcond_estimate(const Mat& m) {
  require_square(m, "rcond");
  double nm = m.norm_one();
  if (nm == 0.0) return 0.0;
  try {
    Mat inv = LuFactor::factor(m).inverse();
    if (!inv.is_finite()) return 0.0;
    double ni = inv.norm_one();
    if (ni == 0.0) return 0.0;
    return std::min(1.0, 1.0 / (nm * ni));
  } catch (const Error&) {
    return 0.0;
  }
}

namespace {

// Iterative row/column norm equalization by powers of two (similarity
// transform; eigenvalues unchanged).
void balance(Mat& a) {
  const int n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(a(j, i));
        r += std::fabs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / 2.0;
      double f = 1.0;
      double s = c + r;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        double ginv = 1.0 / f;
        for (int j = 0; j < n; ++j) a(i, j) *= ginv;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transforms; entries below the subdiagonal are explicitly zeroed afterwards.
void hessenberg(Mat& a) {
  const int n = a.rows();
  for (int m = 1; m < n - 1; ++m) {
    double x = 0.0;
    int i = m;
    for (int j = m; j < n; ++j) {
      if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
        x = a(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (int j = m - 1; j < n; ++j) std::swap(a(i, j), a(m, j));
      for (int j = 0; j < n; ++j) std::swap(a(j, i), a(j, m));
    }
    if (x != 0.0) {
      for (int ii = m + 1; ii < n; ++ii) {
        double y = a(ii, m - 1);
        if (y == 0.0) continue;
        y /= x;
        a(ii, m - 1) = y;
        for (int j = m; j < n; ++j) a(ii, j) -= y * a(m, j);
        for (int j = 0; j < n; ++j) a(j, m) += y * a(j, ii);
      }
    }
  }
  for (int i = 2; i < n; ++i)
    for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR iteration on an upper Hessenberg matrix.
// Classic EISPACK hqr scheme, eigenvalues only.
void hqr(Mat& a, std::vector<Complex>& out) {
  const int n = a.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIterations = 40;

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
  if (anorm == 0.0) {
    out.assign(n, Complex(0.0, 0.0));
    return;
  }

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      if (l < 0) l = 0;
      double x = a(nn, nn);
      if (l == nn) {
        out[nn] = Complex(x + t, 0.0);
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + std::copysign(z, p);
            double r1 = x + z;
            double r2 = (z != 0.0) ? x - w / z : r1;
            out[nn - 1] = Complex(r1, 0.0);
            out[nn] = Complex(r2, 0.0);
          } else {
            out[nn - 1] = Complex(x + p, z);
            out[nn] = Complex(x + p, -z);
          }
          nn -= 2;
        } else {
          if (its == kMaxIterations)
            throw Error(ErrorCode::NumericalFailure,
                        "QR eigenvalue iteration did not converge");
          if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (m = nn - 2; m >= l; --m) {
            z = a(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            double scale = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= scale;
            q /= scale;
            r /= scale;
            if (m == l) break;
            double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            double v = std::fabs(p) *
                       (std::fabs(a(m - 1, m - 1)) + std::fabs(z) + std::fabs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = std::copysign(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              double pp = a(k, j) + q * a(k + 1, j);
              if (k != nn - 1) {
                pp += r * a(k + 2, j);
                a(k + 2, j) -= pp * z;
              }
              a(k + 1, j) -= pp * y;
              a(k, j) -= pp * x;
            }
            int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              double pp = x * a(i, k) + y * a(i, k + 1);
              if (k != nn - 1) {
                pp += z * a(i, k + 2);
                a(i, k + 2) -= pp * r;
              }
              a(i, k + 1) -= pp * q;
              a(i, k) -= pp;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

}  // namespace

std::vector<Complex> eigenvalues(const Mat& m) {
  require_square(m, "eigenvalues");
  if (!m.is_finite())
    throw Error(ErrorCode::InvalidInput, "eigenvalues: entries must be finite");
  const int n = m.rows();
  if (n == 1) return {Complex(m(0, 0), 0.0)};
  Mat a = m;
  balance(a);
  hessenberg(a);
  std::vector<Complex> out(n);
  hqr(a, out);
  return out;
}

}  // namespace mpbvp
