#pragma once

#include <functional>
#include <optional>

#include "mpbvp/dense_output.hpp"
#include "mpbvp/linalg.hpp"

namespace mpbvp {

struct IvpOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1'000'000;  // per leg
  // Step ceiling keeping the cubic Hermite dense output at ~1e-9 between
  // nodes; the controller usually picks smaller steps anyway.
  double max_step = 0.02;
};

/// dy/dt = field(t, y); writes into the last argument.
using OdeField = std::function<void(double, std::span<const double>, std::span<double>)>;
using MatrixFunction = std::function<Mat(double)>;
using VectorField = std::function<void(double, std::span<double>)>;

/// Adaptive embedded Runge-Kutta 5(4) with Dormand-Prince coefficients and
/// cubic Hermite dense output. Integrates from t0 across [t_begin, t_end];
/// an interior t0 produces a forward and a backward leg (the backward leg
/// runs in a reversed time variable).
DenseOutput integrate_ivp(const OdeField& field, double t0,
                          std::span<const double> y0, double t_begin,
                          double t_end, const IvpOptions& opts = {});

/// Fundamental matrix: solves Phi' = A(t) Phi, Phi(0) = I on [0,1] as one
/// coupled n*n system. Result is a dense output of dimension n*n, row major.
DenseOutput fundamental_matrix(const MatrixFunction& a, int n,
                               const IvpOptions& opts = {});

/// Read an n x n matrix value out of a dense output built by
/// fundamental_matrix.
Mat eval_matrix(const DenseOutput& phi, int n, double t);

/// One anchored integral v(t) = integral from `anchor` to t of
/// Phi(s)^{-1} f(s) ds, with v(anchor) = 0 exactly. The inverse is applied by
/// LU-solving Phi(s) w = f(s) at every stage evaluation.
DenseOutput anchored_integral(const DenseOutput& phi, int n,
                              const VectorField& f, double anchor,
                              const IvpOptions& opts = {});

/// All m anchored integrals for strictly increasing anchors in [0,1].
std::vector<DenseOutput> anchored_integrals(const DenseOutput& phi, int n,
                                            const VectorField& f,
                                            std::span<const double> anchors,
                                            const IvpOptions& opts = {});

/// Fundamental matrix plus the anchored integrals actually needed by a split
/// scheme; `needed[k]` marks which integrals to compute (empty = all).
struct FundamentalSolution {
  int n = 0;
  DenseOutput phi;  // n*n
  std::vector<double> anchors;
  std::vector<std::optional<DenseOutput>> v;  // one slot per anchor
  double rtol = 0.0;
  double atol = 0.0;

  Mat phi_at(double t) const { return eval_matrix(phi, n, t); }
  std::vector<double> v_at(std::size_t k, double t) const;
};

FundamentalSolution build_fundamental_solution(
    const MatrixFunction& a, const VectorField& f, int n,
    std::span<const double> anchors, const std::vector<bool>& needed,
    const IvpOptions& opts = {});

}  // namespace mpbvp
