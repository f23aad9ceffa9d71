#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mpbvp/csv.hpp"
#include "mpbvp/picard.hpp"
#include "mpbvp/problem_io.hpp"
#include "mpbvp/report.hpp"
#include "mpbvp/spectral.hpp"
#include "mpbvp/verify.hpp"

namespace {

using namespace mpbvp;
namespace fs = std::filesystem;

// exit codes shared with the test suites
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIllPosed = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitSpectral = 4;
constexpr int kExitVerification = 5;

constexpr double kOdeResidualTol = 1e-6;
constexpr double kBcResidualBase = 1e-8;
constexpr double kOracleTol = 1e-4;

struct GlobalFlags {
  std::string out_dir = ".";
  double tol = 1e-10;
  bool stable_output = false;
};

class PhaseTimer {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  void record(Report& timings, const std::string& key) {
    auto t1 = std::chrono::steady_clock::now();
    timings[key] =
        std::chrono::duration<double, std::milli>(t1 - t0_).count();
    t0_ = t1;
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int map_error_exit(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IllPosed:
      return kExitIllPosed;
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::UnknownFunction:
    case ErrorCode::UnboundVariable:
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::AnchorOffGrid:
    case ErrorCode::IoError:
      return kExitInput;
    default:
      return kExitNumerical;
  }
}

SplitScheme make_split(const BvpProblem& p, const std::string& name) {
  int m = p.boundary_count();
  if (name == "default") return SplitScheme::anchored_first(p.n, m);
  if (name == "uniform") return SplitScheme::uniform(p.n, m);
  if (name == "file") {
    if (!p.split)
      throw Error(ErrorCode::InvalidInput,
                  "--split file requested but the problem has no split field");
    return SplitScheme::from_matrices(*p.split);
  }
  throw Error(ErrorCode::InvalidInput, "unknown split '" + name + "'");
}

Report problem_summary(const BvpProblem& p) {
  Report r;
  r["source"] = p.source;
  r["n"] = p.n;
  r["m"] = p.boundary_count();
  r["mode"] = p.mode == ProblemMode::Linear ? "linear" : "quasilinear";
  Report pts = Report::array();
  for (const auto& bp : p.points) pts.push_back(bp.t);
  r["points"] = pts;
  if (p.eps) r["eps"] = *p.eps;
  return r;
}

Report residual_report(const ResidualSummary& rs, const BvpProblem& p) {
  Report r;
  r["ode_residual_max"] = rs.ode_residual_max;
  r["bc_residual"] = rs.bc_residual;
  r["samples"] = rs.samples;
  r["form"] = p.eps ? "eps*x' - A(t,eps)*x - f" : "x' - A*x - f";
  return r;
}

Report solvability_report(double det_f, double rcond_f,
                          const std::vector<double>& det_fj, bool unique) {
  Report r;
  r["det_F"] = det_f;
  r["rcond_F"] = rcond_f;
  Report dets = Report::array();
  for (double d : det_fj) dets.push_back(d);
  r["det_Fj"] = dets;
  r["verdict"] = unique ? "unique" : "ill-posed";
  return r;
}

void finish_report(Report& report, const GlobalFlags& flags, Report timings,
                   const fs::path& path) {
  if (!flags.stable_output) report["timings"] = std::move(timings);
  write_report_file(path, report);
}

int cmd_solve(const std::string& problem_path, const GlobalFlags& flags,
              const std::string& split_name) {
  fs::create_directories(flags.out_dir);
  fs::path report_path = fs::path(flags.out_dir) / "report.json";
  PhaseTimer timer;
  Report timings;

  BvpProblem p = load_problem(problem_path);
  SplitScheme split = make_split(p, split_name);
  timer.record(timings, "load_ms");

  Report report;
  report["problem"] = problem_summary(p);
  report["split"] = split.name();
  report["tolerances"] = Report{{"rtol", flags.tol}, {"atol", flags.tol * 1e-2}};

  try {
    BvpSolution sol = [&] {
      if (p.mode == ProblemMode::QuasiLinear) {
        PicardOptions popts;
        popts.rtol = flags.tol;
        popts.atol = flags.tol * 1e-2;
        PicardResult r = picard_solve_quasilinear(p, split, popts);
        Report trace;
        trace["iterations"] = r.trace.iterations;
        trace["converged"] = r.trace.converged;
        if (r.trace.deltas.size() >= 3)
          trace["contraction_estimate"] = estimate_contraction(r.trace);
        trace["final_delta"] = r.trace.deltas.back();
        report["picard"] = trace;
        return std::move(r.solution);
      }
      return solve_linear_bvp(p, split, {flags.tol, flags.tol * 1e-2});
    }();
    timer.record(timings, "solve_ms");

    sol.residuals =
        measure_residuals([&](double t) { return sol.eval(t); }, p);
    report["solvability"] =
        solvability_report(sol.det_f, sol.rcond_f, sol.det_fj, true);
    Report c = Report::array();
    for (double v : sol.c()) c.push_back(v);
    report["C"] = c;
    report["residuals"] = residual_report(sol.residuals, p);

    const double bc_tol = kBcResidualBase * (1.0 + vec_norm_inf(p.alpha));
    bool accepted = sol.residuals.ode_residual_max <= kOdeResidualTol &&
                    sol.residuals.bc_residual <= bc_tol;
    report["acceptance"] = Report{{"ode_tol", kOdeResidualTol},
                                  {"bc_tol", bc_tol},
                                  {"pass", accepted}};
    timer.record(timings, "verify_ms");

    fs::path csv_path = fs::path(flags.out_dir) / "solution.csv";
    write_solution_csv_file(csv_path, [&](double t) { return sol.eval(t); },
                            p.n);
    report["solution_csv"] = csv_path.filename().string();
    timer.record(timings, "write_ms");

    finish_report(report, flags, std::move(timings), report_path);
    if (!accepted) {
      std::cerr << "solve: residuals exceed the acceptance thresholds\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const IllPosedError& e) {
    report["solvability"] =
        solvability_report(e.det_f(), e.rcond_f(), e.det_fj(), false);
    report["error"] = Report{{"code", error_code_name(e.code())},
                             {"message", e.what()}};
    finish_report(report, flags, std::move(timings), report_path);
    std::cerr << "solve: " << e.what() << "\n";
    return kExitIllPosed;
  } catch (const Error& e) {
    report["error"] = Report{{"code", error_code_name(e.code())},
                             {"message", e.what()}};
    finish_report(report, flags, std::move(timings), report_path);
    std::cerr << "solve: " << e.what() << "\n";
    return map_error_exit(e);
  }
}

int cmd_spectrum(const std::string& problem_path, const GlobalFlags& flags,
                 int grid) {
  fs::create_directories(flags.out_dir);
  fs::path report_path = fs::path(flags.out_dir) / "spectrum.json";
  PhaseTimer timer;
  Report timings;

  BvpProblem p = load_problem(problem_path);
  EigenTracks tracks = sample_spectrum(
      [&](double t) { return p.eval_limit_matrix(t); }, p.n, grid);
  auto anchors = p.anchors();
  SpectralReport rep = check_conditions(tracks, anchors);
  timer.record(timings, "analyze_ms");

  Report report;
  report["problem"] = problem_summary(p);
  report["grid"] = grid;
  report["anchor_convention"] = rep.anchor_convention;
  report["series_interpretation"] =
      "terms indexed from 0; A0/f0 are the leading coefficients";
  Report conditions = Report::array();
  for (const auto& c : rep.conditions) {
    Report item;
    item["name"] = c.name;
    item["pass"] = c.pass;
    item["margin"] = c.margin;
    item["worst_t"] = c.worst_t;
    item["detail"] = c.detail;
    conditions.push_back(item);
  }
  report["conditions"] = conditions;
  report["overall"] = rep.overall ? "pass" : "fail";
  report["matching"] = Report{{"total_cost", tracks.total_matching_cost},
                              {"max_step", tracks.max_matching_step}};
  finish_report(report, flags, std::move(timings), report_path);
  return rep.overall ? kExitOk : kExitSpectral;
}

int cmd_verify(const std::string& problem_path, const std::string& csv_path,
               const GlobalFlags& flags, int oracle_n) {
  fs::create_directories(flags.out_dir);
  fs::path report_path = fs::path(flags.out_dir) / "verify.json";
  PhaseTimer timer;
  Report timings;

  BvpProblem p = load_problem(problem_path);
  CsvSolution csv = read_solution_csv(csv_path, p.n);
  SolutionEvaluator x = csv.evaluator();
  ResidualSummary rs = measure_residuals(x, p);
  timer.record(timings, "residuals_ms");

  Report report;
  report["problem"] = problem_summary(p);
  report["solution_csv"] = csv_path;
  report["residuals"] = residual_report(rs, p);

  const double bc_tol = kBcResidualBase * (1.0 + vec_norm_inf(p.alpha));
  bool ok = rs.ode_residual_max <= kOdeResidualTol && rs.bc_residual <= bc_tol;

  if (p.mode == ProblemMode::Linear) {
    auto nodes = collocation_solve(p, oracle_n);
    double worst = 0.0;
    double worst_t = 0.0;
    Report table = Report::array();
    for (int i = 0; i <= oracle_n; ++i) {
      double t = static_cast<double>(i) / oracle_n;
      auto xv = x(t);
      double diff = 0.0;
      for (int r = 0; r < p.n; ++r)
        diff = std::max(diff, std::fabs(xv[r] - nodes[i][r]));
      if (diff > worst) {
        worst = diff;
        worst_t = t;
      }
      if (i % (oracle_n / 10) == 0) {
        Report row;
        row["t"] = t;
        row["diff"] = diff;
        table.push_back(row);
      }
    }
    Report oracle;
    oracle["grid"] = oracle_n;
    oracle["sup_diff"] = worst;
    oracle["worst_t"] = worst_t;
    oracle["tol"] = kOracleTol;
    oracle["table"] = table;
    report["oracle"] = oracle;
    ok = ok && worst <= kOracleTol;
  } else {
    report["oracle"] = Report{{"skipped", "quasilinear problem"}};
  }
  timer.record(timings, "oracle_ms");

  report["acceptance"] = Report{{"ode_tol", kOdeResidualTol},
                                {"bc_tol", bc_tol},
                                {"pass", ok}};
  finish_report(report, flags, std::move(timings), report_path);
  if (!ok) std::cerr << "verify: solution fails the tolerance checks\n";
  return ok ? kExitOk : kExitVerification;
}

std::string format_eps(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

int cmd_sweep(const std::string& problem_path, const GlobalFlags& flags,
              std::vector<double> eps_list, const std::string& split_name) {
  fs::create_directories(flags.out_dir);
  fs::path report_path = fs::path(flags.out_dir) / "sweep.json";
  PhaseTimer timer;
  Report timings;

  BvpProblem p = load_problem(problem_path);
  SplitScheme split = make_split(p, split_name);

  // advisory conditions report for the sweep
  Report report;
  report["problem"] = problem_summary(p);
  try {
    EigenTracks tracks = sample_spectrum(
        [&](double t) { return p.eval_limit_matrix(t); }, p.n, 200);
    SpectralReport rep = check_conditions(tracks, p.anchors());
    report["conditions_overall"] = rep.overall ? "pass" : "fail";
  } catch (const Error& e) {
    report["conditions_overall"] = std::string("unavailable: ") + e.what();
  }

  auto entries = epsilon_sweep(p, eps_list, split, {flags.tol, flags.tol * 1e-2});
  timer.record(timings, "sweep_ms");

  Report out_entries = Report::array();
  for (const auto& entry : entries) {
    Report e;
    e["eps"] = entry.eps;
    e["status"] = entry.status;
    if (!entry.reason.empty()) e["reason"] = entry.reason;
    if (entry.status == "solved") {
      Report layers = Report::array();
      for (const auto& lm : entry.layers) {
        Report l;
        l["anchor"] = lm.anchor;
        l["radius"] = lm.radius;
        l["peak_deviation"] = lm.peak;
        layers.push_back(l);
      }
      e["layer_metrics"] = layers;
      e["outer_threshold"] = entry.outer_threshold;
      fs::path csv_path =
          fs::path(flags.out_dir) / ("solution_eps_" + format_eps(entry.eps) + ".csv");
      const BvpSolution& sol = *entry.solution;
      write_solution_csv_file(csv_path, [&](double t) { return sol.eval(t); },
                              p.n);
      e["csv"] = csv_path.filename().string();
    }
    out_entries.push_back(e);
  }
  report["entries"] = out_entries;
  finish_report(report, flags, std::move(timings), report_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"many-point boundary value problem solver"};
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--out", flags.out_dir, "output directory for reports and CSV");
  app.add_option("--tol", flags.tol, "integrator relative tolerance")
      ->check(CLI::Range(1e-14, 1e-2));
  app.add_flag("--stable-output", flags.stable_output,
               "omit timings so identical runs are byte-identical");
  app.require_subcommand(1);

  std::string problem_path;
  std::string split_name = "default";
  std::string csv_path;
  int grid = 200;
  int oracle_n = 400;
  std::vector<double> eps_list;

  CLI::App* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("problem", problem_path, "problem file (JSON)")->required();
  solve->add_option("--split", split_name, "split scheme")
      ->check(CLI::IsMember({"default", "uniform", "file"}));

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "analyze the dichotomy conditions of A0(t)");
  spectrum->add_option("problem", problem_path)->required();
  spectrum->add_option("--grid", grid, "grid intervals for eigenvalue tracks")
      ->check(CLI::Range(21, 100000));

  CLI::App* verify =
      app.add_subcommand("verify", "verify a solution CSV against the problem");
  verify->add_option("problem", problem_path)->required();
  verify->add_option("solution", csv_path, "solution CSV")->required();
  verify->add_option("--oracle", oracle_n, "collocation oracle intervals")
      ->check(CLI::Range(10, 100000));

  CLI::App* sweep = app.add_subcommand("sweep", "solve across a list of eps values");
  sweep->add_option("problem", problem_path)->required();
  sweep->add_option("--eps", eps_list, "comma separated eps values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--split", split_name, "split scheme")
      ->check(CLI::IsMember({"default", "uniform", "file"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(problem_path, flags, split_name);
    if (spectrum->parsed()) return cmd_spectrum(problem_path, flags, grid);
    if (verify->parsed()) return cmd_verify(problem_path, csv_path, flags, oracle_n);
    if (sweep->parsed()) return cmd_sweep(problem_path, flags, eps_list, split_name);
  } catch (const Error& e) {
    std::cerr << argv[0] << ": " << e.what() << "\n";
    return map_error_exit(e);
  } catch (const std::exception& e) {
    std::cerr << argv[0] << ": " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
