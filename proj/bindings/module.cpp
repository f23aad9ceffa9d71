#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpbvp/bvp.hpp"
#include "mpbvp/expr.hpp"
#include "mpbvp/picard.hpp"
#include "mpbvp/problem_io.hpp"
#include "mpbvp/spectral.hpp"
#include "mpbvp/verify.hpp"

namespace py = pybind11;
using namespace mpbvp;

namespace {

SplitScheme split_by_name(const BvpProblem& p, const std::string& name) {
  int m = p.boundary_count();
  if (name == "default") return SplitScheme::anchored_first(p.n, m);
  if (name == "uniform") return SplitScheme::uniform(p.n, m);
  if (name == "file") {
    if (!p.split)
      throw Error(ErrorCode::InvalidInput, "problem has no split field");
    return SplitScheme::from_matrices(*p.split);
  }
  throw Error(ErrorCode::InvalidInput, "unknown split '" + name + "'");
}

Mat mat_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidInput, "empty matrix");
  int r = static_cast<int>(rows.size());
  int c = static_cast<int>(rows.front().size());
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c)
      throw Error(ErrorCode::InvalidInput, "ragged matrix rows");
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

py::dict residuals_dict(const ResidualSummary& rs) {
  py::dict d;
  d["ode_residual_max"] = rs.ode_residual_max;
  d["bc_residual"] = rs.bc_residual;
  d["samples"] = rs.samples;
  return d;
}

py::dict trace_dict(const PicardTrace& tr) {
  py::dict d;
  d["deltas"] = tr.deltas;
  d["ratios"] = tr.ratios;
  d["iterations"] = tr.iterations;
  d["converged"] = tr.converged;
  return d;
}

py::dict report_dict(const SpectralReport& rep) {
  py::dict d;
  py::list conditions;
  for (const auto& c : rep.conditions) {
    py::dict item;
    item["name"] = c.name;
    item["pass"] = c.pass;
    item["margin"] = c.margin;
    item["worst_t"] = c.worst_t;
    item["detail"] = c.detail;
    conditions.append(item);
  }
  d["conditions"] = conditions;
  d["overall"] = rep.overall;
  d["anchor_convention"] = rep.anchor_convention;
  return d;
}

BvpSolution solve_with_residuals(const BvpProblem& p, const std::string& split,
                                 double rtol, double atol) {
  BvpSolution sol = solve_linear_bvp(p, split_by_name(p, split), {rtol, atol});
  sol.residuals = measure_residuals([&](double t) { return sol.eval(t); }, p);
  return sol;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "many-point boundary value problem solver (fundamental-matrix method)";

  py::register_exception<Error>(m, "SolverError");

  py::class_<BvpProblem>(m, "Problem")
      .def_readonly("n", &BvpProblem::n)
      .def_property_readonly("m", &BvpProblem::boundary_count)
      .def_property_readonly("mode",
                             [](const BvpProblem& p) {
                               return p.mode == ProblemMode::Linear
                                          ? "linear"
                                          : "quasilinear";
                             })
      .def_property_readonly("points", &BvpProblem::anchors)
      .def_property_readonly(
          "eps",
          [](const BvpProblem& p) -> py::object {
            if (p.eps) return py::float_(*p.eps);
            return py::none();
          })
      .def("__repr__", [](const BvpProblem& p) {
        return "<Problem n=" + std::to_string(p.n) +
               " m=" + std::to_string(p.boundary_count()) + ">";
      });

  py::class_<BvpSolution>(m, "Solution")
      .def("__call__",
           [](const BvpSolution& s, double t) { return s.eval(t); },
           py::arg("t"))
      .def("sample",
           [](const BvpSolution& s, int points) {
             std::vector<std::vector<double>> out;
             out.reserve(points);
             for (int i = 0; i < points; ++i)
               out.push_back(s.eval(static_cast<double>(i) / (points - 1)));
             return out;
           },
           py::arg("points") = 201)
      .def_property_readonly("C", &BvpSolution::c)
      .def_readonly("det_F", &BvpSolution::det_f)
      .def_readonly("rcond_F", &BvpSolution::rcond_f)
      .def_readonly("det_Fj", &BvpSolution::det_fj)
      .def_property_readonly("residuals",
                             [](const BvpSolution& s) {
                               return residuals_dict(s.residuals);
                             })
      .def("__repr__", [](const BvpSolution& s) {
        return "<Solution dim=" + std::to_string(s.c().size()) + ">";
      });

  m.def("load_problem",
        [](const std::string& path) { return load_problem(path); },
        py::arg("path"), "Load a problem file (JSON).");
  m.def("problem_from_json",
        [](const std::string& text) { return parse_problem_json(text, "<json>"); },
        py::arg("text"), "Parse a problem document from a JSON string.");

  m.def("solve", &solve_with_residuals, py::arg("problem"),
        py::arg("split") = "default", py::arg("rtol") = 1e-10,
        py::arg("atol") = 1e-12,
        "Direct linear solve via the fundamental-matrix representation.");

  m.def(
      "solve_picard",
      [](const BvpProblem& p, const std::string& split, double tol,
         int max_iter) {
        PicardOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        SplitScheme scheme = split_by_name(p, split);
        PicardResult r =
            p.mode == ProblemMode::QuasiLinear
                ? picard_solve_quasilinear(p, scheme, opts)
                : picard_solve_near(
                      p,
                      p.picard_base
                          ? MatrixFunction([pp = &p](double t) {
                              return pp->eval_base_matrix(t);
                            })
                          : frozen_midpoint_base(p),
                      scheme, opts);
        if (p.mode == ProblemMode::Linear)
          r.solution.residuals = measure_residuals(
              [&](double t) { return r.solution.eval(t); }, p);
        return py::make_tuple(r.solution, trace_dict(r.trace));
      },
      py::arg("problem"), py::arg("split") = "default", py::arg("tol") = 1e-10,
      py::arg("max_iter") = 100,
      "Fixed-point solve through a nearby base system; returns (solution, trace).");

  m.def(
      "spectrum",
      [](const BvpProblem& p, int grid) {
        EigenTracks tracks = sample_spectrum(
            [&](double t) { return p.eval_limit_matrix(t); }, p.n, grid);
        return report_dict(check_conditions(tracks, p.anchors()));
      },
      py::arg("problem"), py::arg("grid") = 200,
      "Dichotomy condition verdicts for the leading matrix A0(t).");

  m.def(
      "sweep",
      [](const BvpProblem& p, const std::vector<double>& eps,
         const std::string& split) {
        auto entries = epsilon_sweep(p, eps, split_by_name(p, split));
        py::list out;
        for (const auto& e : entries) {
          py::dict d;
          d["eps"] = e.eps;
          d["status"] = e.status;
          if (!e.reason.empty()) d["reason"] = e.reason;
          if (e.solution) {
            d["solution"] = *e.solution;
            py::list layers;
            for (const auto& lm : e.layers) {
              py::dict l;
              l["anchor"] = lm.anchor;
              l["radius"] = lm.radius;
              l["peak"] = lm.peak;
              layers.append(l);
            }
            d["layers"] = layers;
          }
          out.append(d);
        }
        return out;
      },
      py::arg("problem"), py::arg("eps"), py::arg("split") = "default",
      "Solve across a descending list of eps values with layer metrics.");

  m.def(
      "collocation",
      [](const BvpProblem& p, int intervals) {
        return collocation_solve(p, intervals);
      },
      py::arg("problem"), py::arg("intervals") = 400,
      "Independent finite-difference oracle (grid states).");

  m.def(
      "eigenvalues",
      [](const std::vector<std::vector<double>>& rows) {
        return eigenvalues(mat_from_rows(rows));
      },
      py::arg("matrix"), "Eigenvalues of a real square matrix.");

  m.def(
      "evaluate_expression",
      [](const std::string& source, const std::map<std::string, double>& env) {
        std::vector<std::string> names;
        names.reserve(env.size());
        for (const auto& [k, v] : env) names.push_back(k);
        return Expr::parse(source, names).eval(env);
      },
      py::arg("source"), py::arg("env"),
      "Parse and evaluate a scalar expression against named variables.");

  m.attr("__version__") = "0.1.0";
}
