#include "mpbvp/verify.hpp"

#include <cmath>

namespace mpbvp {

std::vector<std::vector<double>> collocation_solve(const BvpProblem& problem,
                                                   int intervals) {
  problem.validate();
  if (problem.mode != ProblemMode::Linear)
    throw Error(ErrorCode::InvalidInput, "collocation oracle handles linear problems only");
  if (intervals < 10)
    throw Error(ErrorCode::InvalidInput, "collocation needs at least 10 intervals");

  const int n = problem.n;
  const int nodes = intervals + 1;
  const double h = 1.0 / intervals;

  // boundary abscissas must sit on the grid
  std::vector<int> point_node(problem.points.size());
  for (std::size_t j = 0; j < problem.points.size(); ++j) {
    double exact = problem.points[j].t * intervals;
    int idx = static_cast<int>(std::lround(exact));
    if (std::fabs(exact - idx) > 1e-9 * intervals)
      throw Error(ErrorCode::AnchorOffGrid,
                  "boundary point t = " + std::to_string(problem.points[j].t) +
                      " does not lie on the N = " + std::to_string(intervals) +
                      " grid");
    point_node[j] = idx;
  }
  const int bc_node = point_node.front();

  SolveOptions dummy;
  EffectiveSystem sys = make_effective_system(problem, dummy);

  const int dim = nodes * n;
  Mat g(dim, dim);
  std::vector<double> rhs(dim, 0.0);
  auto block = [n](int node) { return node * n; };

  for (int i = 0; i < nodes; ++i) {
    const double ti = static_cast<double>(i) / intervals;
    const int row0 = block(i);
    if (i == bc_node) {
      // boundary functional replaces the ODE rows at this node
      for (std::size_t j = 0; j < problem.points.size(); ++j) {
        const Mat& fj = problem.points[j].f;
        const int col0 = block(point_node[j]);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) g(row0 + r, col0 + c) += fj(r, c);
      }
      for (int r = 0; r < n; ++r) rhs[row0 + r] = problem.alpha[r];
      continue;
    }
    Mat a = sys.a(ti);
    std::vector<double> f = sys.f(ti);
    if (i == 0) {
      // forward one-sided: (-3 x_0 + 4 x_1 - x_2) / (2h)
      for (int r = 0; r < n; ++r) {
        g(row0 + r, block(0) + r) += -3.0 / (2.0 * h);
        g(row0 + r, block(1) + r) += 4.0 / (2.0 * h);
        g(row0 + r, block(2) + r) += -1.0 / (2.0 * h);
      }
    } else if (i == intervals) {
      // backward one-sided: (3 x_N - 4 x_{N-1} + x_{N-2}) / (2h)
      for (int r = 0; r < n; ++r) {
        g(row0 + r, block(intervals) + r) += 3.0 / (2.0 * h);
        g(row0 + r, block(intervals - 1) + r) += -4.0 / (2.0 * h);
        g(row0 + r, block(intervals - 2) + r) += 1.0 / (2.0 * h);
      }
    } else {
      for (int r = 0; r < n; ++r) {
        g(row0 + r, block(i + 1) + r) += 1.0 / (2.0 * h);
        g(row0 + r, block(i - 1) + r) += -1.0 / (2.0 * h);
      }
    }
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) g(row0 + r, block(i) + c) -= a(r, c);
      rhs[row0 + r] += f[r];
    }
  }

  std::vector<double> x = lu_solve_vec(g, rhs);
  std::vector<std::vector<double>> out(nodes, std::vector<double>(n));
  for (int i = 0; i < nodes; ++i)
    for (int r = 0; r < n; ++r) out[i][r] = x[block(i) + r];
  return out;
}

ResidualSummary measure_residuals(const SolutionEvaluator& x,
                                  const BvpProblem& problem, int samples) {
  if (samples < 2)
    throw Error(ErrorCode::InvalidInput, "residual sampling needs >= 2 points");
  const double fd_step = 1e-5;
  const double lhs_scale = problem.eps.value_or(1.0);
  ResidualSummary summary;
  summary.samples = samples;

  for (int i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) / (samples - 1);
    auto xt = x(t);
    auto xp = x(t + fd_step);
    auto xm = x(t - fd_step);
    Mat a = problem.eval_system_matrix(t);
    std::vector<double> f = problem.mode == ProblemMode::QuasiLinear
                                ? problem.eval_forcing(t, xt)
                                : problem.eval_forcing(t);
    auto ax = a.mul_vec(xt);
    double worst = 0.0;
    for (int r = 0; r < problem.n; ++r) {
      double deriv = (xp[r] - xm[r]) / (2.0 * fd_step);
      double res = lhs_scale * deriv - ax[r] - f[r];
      worst = std::max(worst, std::fabs(res));
    }
    summary.ode_residual_max = std::max(summary.ode_residual_max, worst);
  }

  std::vector<double> bc(problem.n, 0.0);
  for (const auto& p : problem.points) {
    auto xt = x(p.t);
    auto fx = p.f.mul_vec(xt);
    for (int r = 0; r < problem.n; ++r) bc[r] += fx[r];
  }
  for (int r = 0; r < problem.n; ++r) bc[r] -= problem.alpha[r];
  summary.bc_residual = vec_norm_inf(bc);
  return summary;
}

}  // namespace mpbvp
