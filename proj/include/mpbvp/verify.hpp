#pragma once

#include "mpbvp/bvp.hpp"

namespace mpbvp {

using SolutionEvaluator = std::function<std::vector<double>(double)>;

/// Independent finite-difference oracle for linear problems: second-order
/// central differences at interior nodes, a one-sided second-order stencil at
/// the free endpoint, and the boundary functional in place of the ODE rows at
/// the node carrying the first boundary point. Returns the N+1 grid states.
/// Boundary abscissas must coincide with grid nodes (AnchorOffGrid).
std::vector<std::vector<double>> collocation_solve(const BvpProblem& problem,
                                                   int intervals);

/// Residual measurement on a uniform sample grid: the ODE residual uses a
/// central finite difference (h = 1e-5) on the supplied evaluator, in the
/// problem's own form (eps x' - A x - f when eps is present); quasi-linear
/// problems substitute f(x(t), t).
ResidualSummary measure_residuals(const SolutionEvaluator& x,
                                  const BvpProblem& problem, int samples = 101);

}  // namespace mpbvp
