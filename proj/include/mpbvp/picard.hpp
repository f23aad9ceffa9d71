#pragma once

#include "mpbvp/bvp.hpp"
#include "mpbvp/verify.hpp"

namespace mpbvp {

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 100;
  double rtol = 1e-10;
  double atol = 1e-12;
  double residual_tol = 1e-6;  // post-hoc acceptance for quasi-linear runs
};

struct PicardTrace {
  std::vector<double> deltas;  // sup-norm change per sweep on the working grid
  std::vector<double> ratios;  // deltas[i+1] / deltas[i]
  int iterations = 0;
  bool converged = false;
};

struct PicardResult {
  BvpSolution solution;
  PicardTrace trace;
};

/// Iterate carrier: values on a uniform grid over [0,1] with piecewise-cubic
/// interpolation for off-grid queries.
class GridFunction {
 public:
  static constexpr int kNodes = 201;

  GridFunction() = default;
  explicit GridFunction(int dim);
  static GridFunction sample(const SolutionEvaluator& f, int dim);

  int dim() const { return dim_; }
  std::vector<double> eval(double t) const;
  void eval(double t, std::span<double> out) const;
  double sup_diff(const GridFunction& other) const;
  std::span<const double> node_values(int i) const;

 private:
  int dim_ = 0;
  std::vector<double> values_;  // kNodes x dim
};

/// The integral-equation map of the fixed-point reduction: a nearby system
/// B(t) with fundamental matrix Psi turns the problem into x = L x, where one
/// application of L solves the linear problem with frozen right-hand side
/// g(t) = (A(t) - B(t)) x(t) + f(...). Construction checks solvability of
/// F0 = sum_j F_j Psi(t_j).
class PicardOperator {
 public:
  PicardOperator(const BvpProblem& problem, MatrixFunction base,
                 const SplitScheme& split, const PicardOptions& opts);

  /// Solve the base linear problem with an arbitrary frozen right-hand side.
  BvpSolution solve_frozen(const VectorField& g) const;

  /// One application of L to an iterate.
  BvpSolution apply(const GridFunction& x) const;

  /// Frozen right-hand side produced from an iterate.
  VectorField frozen_rhs(const GridFunction& x) const;

  const BoundaryMatrix& f0() const { return f0_; }
  int dim() const { return problem_->n; }

 private:
  const BvpProblem* problem_;
  const SplitScheme* split_;
  MatrixFunction base_;
  double scale_ = 1.0;  // 1/eps when eps set
  IvpOptions ivp_;
  DenseOutput psi_;  // fundamental matrix of the base system
  std::vector<double> anchors_;
  std::vector<bool> needed_;
  BoundaryMatrix f0_;
};

/// Fixed-point solve for a perturbed-linear right-hand side
/// (A(t) - B(t)) x + f(t). The first iterate solves the base problem with
/// g = f; sweeps stop when the sup-norm change on the working grid drops to
/// tol. Throws Error(Diverged) after three consecutive non-contracting sweeps
/// or when max_iter is exhausted.
PicardResult picard_solve_near(const BvpProblem& problem, MatrixFunction base,
                               const SplitScheme& split,
                               const PicardOptions& opts = {});

/// Quasi-linear fixed point for f(x, t); starts from the homogeneous base
/// solution, then sweeps. Convergence additionally requires the post-hoc ODE
/// residual to meet opts.residual_tol. Non-finite f(x, t) along an iterate
/// raises Error(NonFiniteRhs).
PicardResult picard_solve_quasilinear(const BvpProblem& problem,
                                      const SplitScheme& split,
                                      const PicardOptions& opts = {});

/// Geometric-mean contraction ratio of a trace; needs >= 3 recorded deltas.
double estimate_contraction(const PicardTrace& trace);

/// Default base when none is supplied: coefficients frozen at the midpoint.
MatrixFunction frozen_midpoint_base(const BvpProblem& problem);

}  // namespace mpbvp
