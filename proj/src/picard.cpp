#include "mpbvp/picard.hpp"

#include <algorithm>
#include <cmath>

namespace mpbvp {

GridFunction::GridFunction(int dim)
    : dim_(dim), values_(static_cast<std::size_t>(kNodes) * dim, 0.0) {}

GridFunction GridFunction::sample(const SolutionEvaluator& f, int dim) {
  GridFunction g(dim);
  for (int i = 0; i < kNodes; ++i) {
    double t = static_cast<double>(i) / (kNodes - 1);
    auto v = f(t);
    std::copy(v.begin(), v.end(), g.values_.begin() + static_cast<std::size_t>(i) * dim);
  }
  return g;
}

std::span<const double> GridFunction::node_values(int i) const {
  return {values_.data() + static_cast<std::size_t>(i) * dim_,
          static_cast<std::size_t>(dim_)};
}

void GridFunction::eval(double t, std::span<double> out) const {
  const int last = kNodes - 1;
  const double h = 1.0 / last;
  // four-point Lagrange window around the containing cell
  int cell = static_cast<int>(std::floor(t / h));
  cell = std::clamp(cell, 0, last - 1);
  int i0 = std::clamp(cell - 1, 0, last - 3);
  double w[4];
  for (int a = 0; a < 4; ++a) {
    double ta = (i0 + a) * h;
    double num = 1.0, den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      double tb = (i0 + b) * h;
      num *= t - tb;
      den *= ta - tb;
    }
    w[a] = num / den;
  }
  for (int k = 0; k < dim_; ++k) {
    double s = 0.0;
    for (int a = 0; a < 4; ++a) s += w[a] * node_values(i0 + a)[k];
    out[k] = s;
  }
}

std::vector<double> GridFunction::eval(double t) const {
  std::vector<double> out(dim_);
  eval(t, out);
  return out;
}

double GridFunction::sup_diff(const GridFunction& other) const {
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    best = std::max(best, std::fabs(values_[i] - other.values_[i]));
  return best;
}

PicardOperator::PicardOperator(const BvpProblem& problem, MatrixFunction base,
                               const SplitScheme& split, const PicardOptions& opts)
    : problem_(&problem), split_(&split), base_(std::move(base)) {
  problem.validate();
  if (split.size() != problem.points.size())
    throw Error(ErrorCode::DimensionMismatch,
                "split scheme size must match the boundary point count");
  ivp_.rtol = opts.rtol;
  ivp_.atol = opts.atol;
  if (problem.eps) {
    if (*problem.eps < kEpsilonFloor)
      throw Error(ErrorCode::EpsilonTooSmall,
                  "eps below the explicit-integrator floor; run the spectrum analysis");
    scale_ = 1.0 / *problem.eps;
    ivp_.rtol = std::max(opts.rtol * *problem.eps, 1e-14);
    ivp_.atol = std::max(opts.atol * *problem.eps, 1e-16);
  }
  anchors_ = problem.anchors();
  auto mask = split.nonzero_mask();
  needed_.assign(mask.begin(), mask.end());
  MatrixFunction scaled_base = [this](double t) { return base_(t).scaled(scale_); };
  psi_ = fundamental_matrix(scaled_base, problem.n, ivp_);
  f0_ = assemble_boundary_matrix(problem.points, psi_, problem.n);
  SolvabilityVerdict verdict = check_solvability(f0_);
  if (!verdict.unique())
    throw IllPosedError("base system: " + verdict.reason, f0_.det, f0_.rcond,
                        f0_.det_fj);
}

BvpSolution PicardOperator::solve_frozen(const VectorField& g) const {
  const int n = problem_->n;
  FundamentalSolution fs;
  fs.n = n;
  fs.phi = psi_;
  fs.anchors = anchors_;
  fs.rtol = ivp_.rtol;
  fs.atol = ivp_.atol;
  fs.v.resize(anchors_.size());
  for (std::size_t k = 0; k < anchors_.size(); ++k) {
    if (!needed_[k]) continue;
    fs.v[k] = anchored_integral(psi_, n, g, anchors_[k], ivp_);
  }
  std::vector<double> c = compute_boundary_constant(f0_, problem_->alpha,
                                                    problem_->points, *split_, fs);
  std::vector<Mat> parts;
  parts.reserve(split_->size());
  for (std::size_t k = 0; k < split_->size(); ++k) parts.push_back((*split_)[k]);
  BvpSolution sol(std::move(fs), std::move(parts), std::move(c));
  sol.boundary_matrix = f0_.f;
  sol.det_f = f0_.det;
  sol.rcond_f = f0_.rcond;
  sol.det_fj = f0_.det_fj;
  sol.split_name = split_->name();
  sol.rtol = ivp_.rtol;
  sol.atol = ivp_.atol;
  sol.eps = problem_->eps;
  return sol;
}

VectorField PicardOperator::frozen_rhs(const GridFunction& x) const {
  const bool quasi = problem_->mode == ProblemMode::QuasiLinear;
  const BvpProblem* p = problem_;
  const MatrixFunction* base = &base_;
  const double scale = scale_;
  // g(t) = (A(t) - B(t)) x(t) + f(t)  or  ... + f(x(t), t), scaled by 1/eps
  return [p, base, scale, quasi, x](double t, std::span<double> out) {
    std::vector<double> xt = x.eval(t);
    Mat diff = p->eval_system_matrix(t) - (*base)(t);
    std::vector<double> g = diff.mul_vec(xt);
    std::vector<double> f;
    try {
      f = quasi ? p->eval_forcing(t, xt) : p->eval_forcing(t);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::EvalDomain)
        throw Error(ErrorCode::NonFiniteRhs,
                    std::string("right-hand side not finite along the iterate: ") +
                        e.what());
      throw;
    }
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = scale * (g[i] + f[i]);
  };
}

BvpSolution PicardOperator::apply(const GridFunction& x) const {
  return solve_frozen(frozen_rhs(x));
}

namespace {

PicardResult run_iteration(const PicardOperator& op, const BvpProblem& problem,
                           BvpSolution first, const PicardOptions& opts,
                           bool quasi) {
  PicardResult out;
  PicardTrace& trace = out.trace;
  const int n = op.dim();

  BvpSolution current = std::move(first);
  GridFunction x_prev = GridFunction::sample(
      [&](double t) { return current.eval(t); }, n);

  int bad_streak = 0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    BvpSolution next = op.apply(x_prev);
    GridFunction x_next =
        GridFunction::sample([&](double t) { return next.eval(t); }, n);
    double delta = x_next.sup_diff(x_prev);
    if (!trace.deltas.empty()) {
      double ratio = trace.deltas.back() > 0.0
                         ? delta / trace.deltas.back()
                         : 0.0;
      trace.ratios.push_back(ratio);
      bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
    }
    trace.deltas.push_back(delta);
    trace.iterations = iter;
    current = std::move(next);
    x_prev = std::move(x_next);

    if (delta <= opts.tol) {
      trace.converged = true;
      break;
    }
    if (bad_streak >= 3)
      throw Error(ErrorCode::Diverged,
                  "fixed-point sweeps stopped contracting (delta " +
                      std::to_string(delta) + " after " + std::to_string(iter) +
                      " sweeps)");
  }
  if (!trace.converged)
    throw Error(ErrorCode::Diverged,
                "fixed point not reached within " +
                    std::to_string(opts.max_iter) + " sweeps");

  current.residuals = measure_residuals(
      [&](double t) { return current.eval(t); }, problem);
  if (quasi && current.residuals.ode_residual_max > opts.residual_tol)
    trace.converged = false;  // stagnated without solving the equation
  out.solution = std::move(current);
  return out;
}

}  // namespace

PicardResult picard_solve_near(const BvpProblem& problem, MatrixFunction base,
                               const SplitScheme& split,
                               const PicardOptions& opts) {
  if (problem.mode != ProblemMode::Linear)
    throw Error(ErrorCode::InvalidInput,
                "perturbed-linear solve expects a linear problem");
  PicardOperator op(problem, std::move(base), split, opts);
  // first iterate: base system with g = f
  EffectiveSystem sys = make_effective_system(problem, {opts.rtol, opts.atol});
  VectorField g0 = [&](double t, std::span<double> out) {
    auto v = sys.f(t);
    std::copy(v.begin(), v.end(), out.begin());
  };
  BvpSolution first = op.solve_frozen(g0);
  return run_iteration(op, problem, std::move(first), opts, /*quasi=*/false);
}

PicardResult picard_solve_quasilinear(const BvpProblem& problem,
                                      const SplitScheme& split,
                                      const PicardOptions& opts) {
  if (problem.mode != ProblemMode::QuasiLinear)
    throw Error(ErrorCode::InvalidInput, "expected a quasi-linear problem");
  MatrixFunction base = problem.picard_base
                            ? MatrixFunction([p = &problem](double t) {
                                return p->eval_base_matrix(t);
                              })
                            : frozen_midpoint_base(problem);
  PicardOperator op(problem, std::move(base), split, opts);
  // start from the homogeneous base solution
  BvpSolution first = op.solve_frozen(
      [n = problem.n](double, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
      });
  return run_iteration(op, problem, std::move(first), opts, /*quasi=*/true);
}

double estimate_contraction(const PicardTrace& trace) {
  if (trace.deltas.size() < 3)
    throw Error(ErrorCode::InsufficientData,
                "contraction estimate needs at least 3 recorded deltas");
  double first = trace.deltas.front();
  double last = trace.deltas.back();
  if (first <= 0.0) return 0.0;
  double k = static_cast<double>(trace.deltas.size() - 1);
  return std::pow(last / first, 1.0 / k);
}

MatrixFunction frozen_midpoint_base(const BvpProblem& problem) {
  Mat frozen = problem.eval_system_matrix(0.5);
  return [frozen](double) { return frozen; };
}

}  // namespace mpbvp
