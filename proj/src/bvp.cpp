#include "mpbvp/bvp.hpp"

#include <algorithm>
#include <cmath>

namespace mpbvp {

BvpSolution::BvpSolution(FundamentalSolution fs, std::vector<Mat> split_parts,
                         std::vector<double> c)
    : fs_(std::move(fs)), split_(std::move(split_parts)), c_(std::move(c)) {
  for (std::size_t k = 0; k < split_.size(); ++k)
    if (!split_[k].is_zero()) active_.push_back(k);
}

void BvpSolution::eval(double t, std::span<double> out) const {
  std::vector<double> acc = c_;
  for (std::size_t k : active_) {
    std::vector<double> vk = fs_.v_at(k, t);
    std::vector<double> pv = split_[k].mul_vec(vk);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += pv[i];
  }
  Mat phi = fs_.phi_at(t);
  auto y = phi.mul_vec(acc);
  std::copy(y.begin(), y.end(), out.begin());
}

std::vector<double> BvpSolution::eval(double t) const {
  std::vector<double> out(fs_.n);
  eval(t, out);
  return out;
}

BoundaryMatrix assemble_boundary_matrix(std::span<const BoundaryPoint> points,
                                        const DenseOutput& phi, int n) {
  BoundaryMatrix bm;
  bm.f = Mat(n, n);
  for (const auto& p : points) {
    Mat phi_tj = eval_matrix(phi, n, p.t);
    bm.f = bm.f + p.f * phi_tj;
    bm.det_fj.push_back(determinant(p.f));
  }
  bm.det = determinant(bm.f);
  bm.rcond = rcond_estimate(bm.f);
  return bm;
}

SolvabilityVerdict check_solvability(const BoundaryMatrix& bm) {
  SolvabilityVerdict v;
  v.det = bm.det;
  v.rcond = bm.rcond;
  if (bm.rcond >= kSolvabilityRcond) {
    v.kind = Solvability::Unique;
  } else {
    v.kind = Solvability::IllPosedProblem;
    v.reason = "boundary matrix F is singular to working precision (rcond " +
               std::to_string(bm.rcond) + ")";
  }
  return v;
}

std::vector<double> compute_boundary_constant(
    const BoundaryMatrix& bm, std::span<const double> alpha,
    std::span<const BoundaryPoint> points, const SplitScheme& split,
    const FundamentalSolution& fs) {
  const int n = fs.n;
  std::vector<double> rhs(alpha.begin(), alpha.end());
  for (std::size_t j = 0; j < points.size(); ++j) {
    std::vector<double> acc(n, 0.0);
    for (std::size_t k = 0; k < split.size(); ++k) {
      if (split[k].is_zero()) continue;
      auto vk = fs.v_at(k, points[j].t);
      auto pv = split[k].mul_vec(vk);
      for (int i = 0; i < n; ++i) acc[i] += pv[i];
    }
    if (vec_norm_inf(acc) == 0.0) continue;
    Mat phi_tj = fs.phi_at(points[j].t);
    auto contribution = points[j].f.mul_vec(phi_tj.mul_vec(acc));
    for (int i = 0; i < n; ++i) rhs[i] -= contribution[i];
  }
  return lu_solve_vec(bm.f, rhs);
}

EffectiveSystem make_effective_system(const BvpProblem& problem,
                                      const SolveOptions& opts) {
  EffectiveSystem sys;
  sys.ivp.rtol = opts.rtol;
  sys.ivp.atol = opts.atol;
  if (problem.eps) {
    if (*problem.eps < kEpsilonFloor)
      throw Error(ErrorCode::EpsilonTooSmall,
                  "eps below the explicit-integrator floor " +
                      std::to_string(kEpsilonFloor) +
                      "; run the spectrum analysis for the dichotomy verdicts");
    sys.scale = 1.0 / *problem.eps;
    sys.ivp.rtol = std::max(opts.rtol * *problem.eps, 1e-14);
    sys.ivp.atol = std::max(opts.atol * *problem.eps, 1e-16);
  }
  const double scale = sys.scale;
  const BvpProblem* p = &problem;
  sys.a = [p, scale](double t) { return p->eval_system_matrix(t).scaled(scale); };
  sys.f = [p, scale](double t) {
    auto v = p->eval_forcing(t);
    for (double& x : v) x *= scale;
    return v;
  };
  return sys;
}

BvpSolution solve_linear_bvp(const BvpProblem& problem, const SplitScheme& split,
                             const SolveOptions& opts) {
  problem.validate();
  if (problem.mode != ProblemMode::Linear)
    throw Error(ErrorCode::InvalidInput,
                "quasi-linear problems are handled by the fixed-point solver");
  if (split.size() != problem.points.size())
    throw Error(ErrorCode::DimensionMismatch,
                "split scheme size must match the boundary point count");

  EffectiveSystem sys = make_effective_system(problem, opts);
  VectorField f_field = [&](double t, std::span<double> out) {
    auto v = sys.f(t);
    std::copy(v.begin(), v.end(), out.begin());
  };

  auto anchors = problem.anchors();
  auto mask = split.nonzero_mask();
  std::vector<bool> needed(mask.begin(), mask.end());
  FundamentalSolution fs = build_fundamental_solution(
      sys.a, f_field, problem.n, anchors, needed, sys.ivp);

  BoundaryMatrix bm = assemble_boundary_matrix(problem.points, fs.phi, problem.n);
  SolvabilityVerdict verdict = check_solvability(bm);
  if (!verdict.unique())
    throw IllPosedError(verdict.reason, bm.det, bm.rcond, bm.det_fj);

  std::vector<double> c =
      compute_boundary_constant(bm, problem.alpha, problem.points, split, fs);

  std::vector<Mat> parts;
  parts.reserve(split.size());
  for (std::size_t k = 0; k < split.size(); ++k) parts.push_back(split[k]);

  BvpSolution sol(std::move(fs), std::move(parts), std::move(c));
  sol.boundary_matrix = bm.f;
  sol.det_f = bm.det;
  sol.rcond_f = bm.rcond;
  sol.det_fj = bm.det_fj;
  sol.split_name = split.name();
  sol.rtol = sys.ivp.rtol;
  sol.atol = sys.ivp.atol;
  sol.eps = problem.eps;
  return sol;
}

}  // namespace mpbvp
