#pragma once

#include "mpbvp/bvp.hpp"

namespace mpbvp {

/// Eigenvalue samples of A0(t) stitched into continuous tracks.
struct EigenTracks {
  std::vector<double> grid;                    // N+1 uniform points in [0,1]
  std::vector<std::vector<Complex>> tracks;    // n tracks, each N+1 values
  double total_matching_cost = 0.0;
  double max_matching_step = 0.0;

  int track_count() const { return static_cast<int>(tracks.size()); }
};

/// Sample the spectrum on a uniform grid and stitch tracks by greedy
/// nearest-neighbor matching between consecutive grid points (ties broken by
/// index). Tracks are ordered at t = 0 by (Re, Im) ascending.
EigenTracks sample_spectrum(const MatrixFunction& a0, int n, int grid_size);

struct ConditionVerdict {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive slack when passing
  double worst_t = 0.0;
  std::string detail;
};

struct SpectralReport {
  std::vector<ConditionVerdict> conditions;
  bool overall = false;
  std::string anchor_convention;  // whether the first point sits at t = 0

  const ConditionVerdict* find(std::string_view name) const;
};

/// Dichotomy conditions on the tracks against the boundary points, one track
/// per point in index order. Sign tests use tolerance 1e-10; the distinctness
/// and nonvanishing gaps use 1e-8; the cumulative integral test is strict
/// (< -1e-12), evaluated by trapezoid sums on the track grid.
SpectralReport check_conditions(const EigenTracks& tracks,
                                std::span<const double> points);

struct LayerMetric {
  double anchor = 0.0;
  double radius = 0.0;   // smallest rho so the outer model holds beyond it
  double peak = 0.0;     // largest deviation from the outer model
};

struct SweepEntry {
  double eps = 0.0;
  std::string status;  // "solved" | "refused" | "failed"
  std::string reason;
  std::optional<BvpSolution> solution;
  std::vector<LayerMetric> layers;
  double outer_threshold = 0.0;
};

/// Solve the problem across a descending list of eps values. Values below the
/// integrator floor are recorded as refused; per-eps numerical failures are
/// recorded and the sweep continues. Layer radii compare the solution with
/// the first-order outer model x0(t) + eps*x1(t), where x0 solves
/// 0 = A0 x + f0 pointwise (OuterUndefined if A0(t) is singular at a sample).
std::vector<SweepEntry> epsilon_sweep(const BvpProblem& problem,
                                      std::span<const double> eps_list,
                                      const SplitScheme& split,
                                      const SolveOptions& opts = {});

}  // namespace mpbvp
