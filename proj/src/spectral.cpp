#include "mpbvp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpbvp {

namespace {

constexpr double kSignTolerance = 1e-10;
constexpr double kGapThreshold = 1e-8;
constexpr double kIntegralStrict = -1e-12;

}  // namespace

EigenTracks sample_spectrum(const MatrixFunction& a0, int n, int grid_size) {
  if (grid_size < 21)
    throw Error(ErrorCode::InvalidInput, "spectrum grid must have at least 21 intervals");
  EigenTracks out;
  out.grid.resize(grid_size + 1);
  out.tracks.assign(n, std::vector<Complex>(grid_size + 1));

  for (int g = 0; g <= grid_size; ++g) {
    double t = static_cast<double>(g) / grid_size;
    out.grid[g] = t;
    Mat m = a0(t);
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "A0(t) has the wrong shape");
    std::vector<Complex> eig = eigenvalues(m);

    if (g == 0) {
      std::sort(eig.begin(), eig.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
      });
      for (int k = 0; k < n; ++k) out.tracks[k][0] = eig[k];
      continue;
    }

    // greedy nearest-neighbor matching against the previous grid point,
    // smallest pair distance first, ties by (track, eigenvalue) index
    struct Pair {
      double dist;
      int track;
      int value;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
      for (int v = 0; v < n; ++v)
        pairs.push_back({std::abs(out.tracks[k][g - 1] - eig[v]), k, v});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.track != b.track) return a.track < b.track;
      return a.value < b.value;
    });
    std::vector<bool> track_done(n, false), value_done(n, false);
    int assigned = 0;
    double step_cost = 0.0;
    for (const Pair& p : pairs) {
      if (track_done[p.track] || value_done[p.value]) continue;
      out.tracks[p.track][g] = eig[p.value];
      track_done[p.track] = true;
      value_done[p.value] = true;
      out.total_matching_cost += p.dist;
      step_cost = std::max(step_cost, p.dist);
      if (++assigned == n) break;
    }
    out.max_matching_step = std::max(out.max_matching_step, step_cost);
  }
  return out;
}

const ConditionVerdict* SpectralReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// cumulative trapezoid of Re lambda_k along the grid
std::vector<double> cumulative_real_integral(const EigenTracks& tr, int k) {
  const auto& grid = tr.grid;
  std::vector<double> acc(grid.size(), 0.0);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    double dt = grid[g] - grid[g - 1];
    acc[g] = acc[g - 1] +
             0.5 * dt * (tr.tracks[k][g].real() + tr.tracks[k][g - 1].real());
  }
  return acc;
}

double interp_linear(std::span<const double> grid, std::span<const double> values,
                     double t) {
  if (t <= grid.front()) return values.front();
  if (t >= grid.back()) return values.back();
  auto it = std::upper_bound(grid.begin(), grid.end(), t);
  std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  double w = (t - grid[i]) / (grid[i + 1] - grid[i]);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

}  // namespace

SpectralReport check_conditions(const EigenTracks& tracks,
                                std::span<const double> points) {
  const int n = tracks.track_count();
  if (static_cast<int>(points.size()) != n)
    throw Error(ErrorCode::DimensionMismatch,
                "conditions pair track k with point t_k; counts must match");
  const auto& grid = tracks.grid;
  const int npts = static_cast<int>(grid.size());

  SpectralReport report;
  report.anchor_convention =
      points.front() < 1e-12 ? "t1 == 0" : "0 < t1";

  // (a) distinctness of the tracks everywhere
  {
    ConditionVerdict v;
    v.name = "lambda_distinct";
    double min_gap = std::numeric_limits<double>::infinity();
    for (int g = 0; g < npts; ++g) {
      for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          double gap = std::abs(tracks.tracks[j][g] - tracks.tracks[k][g]);
          if (gap < min_gap) {
            min_gap = gap;
            v.worst_t = grid[g];
          }
        }
      }
    }
    if (n < 2) min_gap = std::numeric_limits<double>::infinity();
    v.margin = min_gap;
    v.pass = min_gap > kGapThreshold;
    v.detail = "min pairwise eigenvalue gap";
    report.conditions.push_back(std::move(v));
  }

  // (b) no eigenvalue vanishes. The sign-switch pattern forces an interior
  // track through zero exactly at its own point, so each track is scanned
  // away from its anchor; a zero anywhere else is a turning point and fails.
  {
    ConditionVerdict v;
    v.name = "lambda_nonzero";
    const double half_cell = 0.5 * (grid[1] - grid[0]);
    double min_abs = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      for (int g = 0; g < npts; ++g) {
        if (std::fabs(grid[g] - points[k]) < half_cell) continue;
        double a = std::abs(tracks.tracks[k][g]);
        if (a < min_abs) {
          min_abs = a;
          v.worst_t = grid[g];
        }
      }
    }
    v.margin = min_abs;
    v.pass = min_abs > kGapThreshold;
    v.detail = "min |lambda| over each track away from its own anchor";
    report.conditions.push_back(std::move(v));
  }

  // (c)+(d) sign pattern per track, by the position of its paired point:
  // left end: Re <= 0 on [0,1]; right end: Re >= 0 on [0,1]; interior point:
  // Re >= 0 before t_k and Re <= 0 after.
  auto sign_check = [&](int k, double tk, bool left_layer, bool right_layer,
                        ConditionVerdict& v) {
    double slack = std::numeric_limits<double>::infinity();
    for (int g = 0; g < npts; ++g) {
      double re = tracks.tracks[k][g].real();
      double t = grid[g];
      double s = std::numeric_limits<double>::infinity();
      if (left_layer) {
        s = kSignTolerance - re;  // need re <= tau
      } else if (right_layer) {
        s = re + kSignTolerance;  // need re >= -tau
      } else {
        if (t <= tk) s = re + kSignTolerance;
        if (t >= tk) s = std::min(s, kSignTolerance - re);
      }
      if (s < slack) {
        slack = s;
        v.worst_t = t;
      }
    }
    v.margin = slack;
    v.pass = slack >= 0.0;
  };

  {
    ConditionVerdict v;
    v.name = "endpoint_signs";
    if (n == 1) {
      bool left = points[0] <= 1e-12;
      bool right = points[0] >= 1.0 - 1e-12;
      sign_check(0, points[0], left && !right, right, v);
      v.detail = "single track, sign tied to its anchor position";
    } else {
      ConditionVerdict first, last;
      sign_check(0, points[0], true, false, first);
      sign_check(n - 1, points[n - 1], false, true, last);
      if (first.margin <= last.margin) {
        v.margin = first.margin;
        v.worst_t = first.worst_t;
      } else {
        v.margin = last.margin;
        v.worst_t = last.worst_t;
      }
      v.pass = first.pass && last.pass;
      v.detail = "Re of track 1 nonpositive and of track n nonnegative";
    }
    report.conditions.push_back(std::move(v));
  }

  {
    ConditionVerdict v;
    v.name = "interior_signs";
    v.pass = true;
    v.margin = std::numeric_limits<double>::infinity();
    for (int k = 1; k + 1 < n; ++k) {
      ConditionVerdict sub;
      sign_check(k, points[k], false, false, sub);
      if (sub.margin < v.margin) {
        v.margin = sub.margin;
        v.worst_t = sub.worst_t;
      }
      v.pass = v.pass && sub.pass;
    }
    v.detail = n > 2 ? "sign switch of interior tracks at their points"
                     : "no interior tracks";
    report.conditions.push_back(std::move(v));
  }

  // (e) strict dichotomy integral: Re integral from t_k to t of lambda_k < 0
  {
    ConditionVerdict v;
    v.name = "integral_negative";
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      auto acc = cumulative_real_integral(tracks, k);
      double base = interp_linear(grid, acc, points[k]);
      for (int g = 0; g < npts; ++g) {
        if (std::fabs(grid[g] - points[k]) < 1e-12) continue;
        double value = acc[g] - base;
        if (value > worst) {
          worst = value;
          v.worst_t = grid[g];
        }
      }
    }
    v.margin = -worst;
    v.pass = worst < kIntegralStrict;
    v.detail = "largest Re integral from the anchor (must stay negative)";
    report.conditions.push_back(std::move(v));
  }

  report.overall = true;
  for (const auto& c : report.conditions) report.overall = report.overall && c.pass;
  return report;
}

std::vector<SweepEntry> epsilon_sweep(const BvpProblem& problem,
                                      std::span<const double> eps_list,
                                      const SplitScheme& split,
                                      const SolveOptions& opts) {
  problem.validate();
  if (problem.mode != ProblemMode::Linear)
    throw Error(ErrorCode::InvalidInput, "eps sweeps handle linear problems only");
  if (eps_list.empty())
    throw Error(ErrorCode::InvalidInput, "eps list must not be empty");

  constexpr int kGrid = 200;  // sample grid for the layer metrics
  std::vector<double> ts(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) ts[i] = static_cast<double>(i) / kGrid;

  // zeroth-order outer model: A0(t) x0 = -f0(t) pointwise
  std::vector<std::vector<double>> x0(ts.size());
  auto outer0 = [&](double t) {
    Mat a0 = problem.eval_limit_matrix(t);
    if (rcond_estimate(a0) < kSolvabilityRcond)
      throw Error(ErrorCode::OuterUndefined,
                  "A0(t) is singular at t = " + std::to_string(t) +
                      "; the outer model is undefined");
    auto f0 = problem.eval_limit_forcing(t);
    for (double& v : f0) v = -v;
    return lu_solve_vec(a0, f0);
  };
  for (std::size_t i = 0; i < ts.size(); ++i) x0[i] = outer0(ts[i]);

  // first-order correction x1 = A0^{-1} (x0' - A1 x0 - f1), x0' by central
  // differences (one-sided at the ends)
  std::vector<std::vector<double>> x1(ts.size());
  const double fd = 1e-5;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double t = ts[i];
    double lo = std::max(0.0, t - fd);
    double hi = std::min(1.0, t + fd);
    auto xp = outer0(hi);
    auto xm = outer0(lo);
    std::vector<double> dx0(problem.n);
    for (int r = 0; r < problem.n; ++r) dx0[r] = (xp[r] - xm[r]) / (hi - lo);
    Mat a0 = problem.eval_limit_matrix(t);
    Mat a1 = problem.eval_order1_matrix(t);
    auto f1 = problem.eval_order1_forcing(t);
    auto a1x0 = a1.mul_vec(x0[i]);
    std::vector<double> rhs(problem.n);
    for (int r = 0; r < problem.n; ++r) rhs[r] = dx0[r] - a1x0[r] - f1[r];
    x1[i] = lu_solve_vec(a0, rhs);
  }

  std::vector<SweepEntry> entries;
  for (double eps : eps_list) {
    SweepEntry entry;
    entry.eps = eps;
    if (!(eps > 0.0) || eps < kEpsilonFloor) {
      entry.status = "refused";
      entry.reason = "eps below the explicit-integrator floor 1e-3";
      entries.push_back(std::move(entry));
      continue;
    }
    BvpProblem scaled = problem;
    scaled.eps = eps;
    try {
      BvpSolution sol = solve_linear_bvp(scaled, split, opts);

      double xsup = 0.0;
      std::vector<std::vector<double>> xs(ts.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        xs[i] = sol.eval(ts[i]);
        xsup = std::max(xsup, vec_norm_inf(xs[i]));
      }
      const double threshold = 0.01 * xsup;
      entry.outer_threshold = threshold;

      std::vector<double> deviation(ts.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        double worst = 0.0;
        for (int r = 0; r < problem.n; ++r) {
          double outer = x0[i][r] + eps * x1[i][r];
          worst = std::max(worst, std::fabs(xs[i][r] - outer));
        }
        deviation[i] = worst;
      }
      for (const auto& p : problem.points) {
        LayerMetric lm;
        lm.anchor = p.t;
        for (std::size_t i = 0; i < ts.size(); ++i) {
          lm.peak = std::max(lm.peak, deviation[i]);
          if (deviation[i] > threshold)
            lm.radius = std::max(lm.radius, std::fabs(ts[i] - p.t));
        }
        entry.layers.push_back(lm);
      }
      entry.solution = std::move(sol);
      entry.status = "solved";
    } catch (const Error& e) {
      entry.status = "failed";
      entry.reason = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace mpbvp
