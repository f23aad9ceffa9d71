#pragma once

#include <functional>

#include "mpbvp/integrate.hpp"
#include "mpbvp/problem.hpp"

namespace mpbvp {

struct SolveOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
};

/// Problems with eps below this floor are refused: the explicit integrator
/// cannot track the boundary layers; run the spectrum analysis instead.
inline constexpr double kEpsilonFloor = 1e-3;

/// Reciprocal-condition threshold deciding unique solvability of F.
inline constexpr double kSolvabilityRcond = 1e-12;

struct BoundaryMatrix {
  Mat f;
  double det = 0.0;
  double rcond = 0.0;
  std::vector<double> det_fj;  // determinant of each F_j, for diagnostics
};

enum class Solvability { Unique, IllPosedProblem };

struct SolvabilityVerdict {
  Solvability kind = Solvability::Unique;
  double det = 0.0;
  double rcond = 0.0;
  std::string reason;
  bool unique() const { return kind == Solvability::Unique; }
};

struct ResidualSummary {
  double ode_residual_max = 0.0;
  double bc_residual = 0.0;
  int samples = 0;
};

/// Solution of a linear many-point problem in fundamental-matrix form:
/// x(t) = Phi(t) (C + sum_k P_k v_k(t)).
class BvpSolution {
 public:
  BvpSolution() = default;
  BvpSolution(FundamentalSolution fs, std::vector<Mat> split_parts,
              std::vector<double> c);

  std::vector<double> eval(double t) const;
  void eval(double t, std::span<double> out) const;

  const std::vector<double>& c() const { return c_; }
  const FundamentalSolution& fundamental() const { return fs_; }

  // solvability diagnostics
  Mat boundary_matrix;
  double det_f = 0.0;
  double rcond_f = 0.0;
  std::vector<double> det_fj;

  // provenance
  std::string split_name;
  double rtol = 0.0;
  double atol = 0.0;
  std::optional<double> eps;

  ResidualSummary residuals;  // filled by measure_residuals

 private:
  FundamentalSolution fs_;
  std::vector<Mat> split_;
  std::vector<double> c_;
  std::vector<std::size_t> active_;  // indices of nonzero split parts
};

/// F = sum_j F_j Phi(t_j), with det and rcond attached.
BoundaryMatrix assemble_boundary_matrix(std::span<const BoundaryPoint> points,
                                        const DenseOutput& phi, int n);

SolvabilityVerdict check_solvability(const BoundaryMatrix& bm);

/// C = F^{-1} (alpha - sum_j F_j Phi(t_j) sum_k P_k v_k(t_j)).
std::vector<double> compute_boundary_constant(
    const BoundaryMatrix& bm, std::span<const double> alpha,
    std::span<const BoundaryPoint> points, const SplitScheme& split,
    const FundamentalSolution& fs);

/// Direct solve of a linear problem through the fundamental-matrix
/// representation. Throws IllPosedError when F fails the solvability test,
/// StiffnessError if integration gives up, Error(EpsilonTooSmall) for eps
/// below the floor.
BvpSolution solve_linear_bvp(const BvpProblem& problem, const SplitScheme& split,
                             const SolveOptions& opts = {});

/// Effective first-order field of a problem: divides A and f through by eps
/// when present. Shared by the direct solver, the fixed-point solver and the
/// collocation oracle.
struct EffectiveSystem {
  double scale = 1.0;           // 1/eps or 1
  IvpOptions ivp;               // tolerances tightened by eps
  MatrixFunction a;             // scaled system matrix
  std::function<std::vector<double>(double)> f;  // scaled forcing (linear)
};

EffectiveSystem make_effective_system(const BvpProblem& problem,
                                      const SolveOptions& opts);

}  // namespace mpbvp
