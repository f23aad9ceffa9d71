#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpbvp/bvp.hpp"
#include "mpbvp/csv.hpp"
#include "mpbvp/problem_io.hpp"
#include "mpbvp/report.hpp"

using namespace mpbvp;

namespace {

const char* kTwoPoint = R"json({
  "n": 1,
  "mode": "linear",
  "A": [["1"]],
  "f": ["1"],
  "points": [
    {"t": 0.0, "F": [[1.0]]},
    {"t": 1.0, "F": [[1.0]]}
  ],
  "alpha": [0.0]
})json";

}  // namespace

TEST_CASE("problem files parse into solvable problems") {
  BvpProblem p = parse_problem_json(kTwoPoint, "inline");
  CHECK(p.n == 1);
  CHECK(p.mode == ProblemMode::Linear);
  CHECK(p.boundary_count() == 2);
  BvpSolution sol = solve_linear_bvp(p, SplitScheme::anchored_first(1, 2));
  CHECK(std::fabs(sol.c()[0] - (2.0 / (1.0 + std::exp(1.0)) - 1.0)) <= 1e-8);
}

TEST_CASE("series terms and eps fields load") {
  const char* doc = R"json({
    "n": 1,
    "A": [ [["-1"]], [["0.5"]] ],
    "f": [ ["t"], ["1"] ],
    "points": [ {"t": 0.0, "F": [[1.0]]} ],
    "alpha": [2.0],
    "eps": 0.05
  })json";
  BvpProblem p = parse_problem_json(doc, "inline");
  REQUIRE(p.a_terms.size() == 2);
  REQUIRE(p.f_terms.size() == 2);
  CHECK(p.eps == doctest::Approx(0.05));
  // A(t, eps) = -1 + 0.5 eps
  Mat a = p.eval_system_matrix(0.3);
  CHECK(a(0, 0) == doctest::Approx(-1.0 + 0.5 * 0.05));
  CHECK(p.eval_limit_matrix(0.3)(0, 0) == doctest::Approx(-1.0));
  CHECK(p.eval_order1_matrix(0.3)(0, 0) == doctest::Approx(0.5));
  auto f = p.eval_forcing(0.3);
  CHECK(f[0] == doctest::Approx(0.3 + 0.05));
}

TEST_CASE("quasi-linear forcing sees the state variables") {
  const char* doc = R"json({
    "n": 2,
    "mode": "quasilinear",
    "A": [["0", "1"], ["-1", "0"]],
    "f": ["0.1*sin(x1)", "x2*t"],
    "points": [
      {"t": 0.0, "F": [[1, 0], [0, 1]]},
      {"t": 1.0, "F": [[1, 0], [0, 1]]}
    ],
    "alpha": [1.0, 0.0]
  })json";
  BvpProblem p = parse_problem_json(doc, "inline");
  std::vector<double> x{0.5, 2.0};
  auto f = p.eval_forcing(0.25, x);
  CHECK(f[0] == doctest::Approx(0.1 * std::sin(0.5)));
  CHECK(f[1] == doctest::Approx(2.0 * 0.25));
}

TEST_CASE("linear problems must not reference states") {
  const char* doc = R"json({
    "n": 1,
    "A": [["1"]],
    "f": ["x1"],
    "points": [ {"t": 0.0, "F": [[1.0]]} ],
    "alpha": [0.0]
  })json";
  CHECK_THROWS_AS(parse_problem_json(doc, "inline"), Error);
}

TEST_CASE("structural errors are caught with field context") {
  CHECK_THROWS_AS(parse_problem_json("{ not json", "inline"), Error);
  CHECK_THROWS_AS(parse_problem_json("{}", "inline"), Error);
  const char* bad_shape = R"json({
    "n": 2,
    "A": [["1"]],
    "f": ["0", "0"],
    "points": [ {"t": 0.0, "F": [[1,0],[0,1]]} ],
    "alpha": [0.0, 0.0]
  })json";
  try {
    parse_problem_json(bad_shape, "inline");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
  const char* bad_split = R"json({
    "n": 1,
    "A": [["1"]],
    "f": ["0"],
    "points": [ {"t": 0.0, "F": [[1.0]]}, {"t": 1.0, "F": [[1.0]]} ],
    "alpha": [0.0],
    "split": [ [[0.5]], [[0.4]] ]
  })json";
  CHECK_THROWS_AS(parse_problem_json(bad_split, "inline"), Error);
}

TEST_CASE("csv round trip preserves the samples") {
  auto f = [](double t) {
    return std::vector<double>{std::sin(t), std::cos(3.0 * t)};
  };
  auto dir = std::filesystem::temp_directory_path() / "mpbvp_csv_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "roundtrip.csv";
  write_solution_csv_file(path, f, 2, 201);

  CsvSolution back = read_solution_csv(path, 2);
  CHECK(back.rows() == 201);
  for (double t : {0.0, 0.123, 0.5, 0.987, 1.0}) {
    auto got = back.eval(t);
    auto want = f(t);
    CHECK(std::fabs(got[0] - want[0]) <= 1e-8);
    CHECK(std::fabs(got[1] - want[1]) <= 1e-8);
  }
  CHECK_THROWS_AS(read_solution_csv(path, 3), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("report rendering is stable and 15-digit") {
  Report r;
  r["name"] = "demo";
  r["value"] = 0.1;
  r["nested"]["pi"] = 3.14159265358979;
  r["list"] = {1.0, 2.5};
  r["count"] = 3;
  std::string a = render_report(r);
  std::string b = render_report(r);
  CHECK(a == b);
  CHECK(a.find("0.1") != std::string::npos);
  CHECK(a.find("3.14159265358979") != std::string::npos);
  CHECK(a.find("\"count\": 3") != std::string::npos);
  // floats keep a decimal point so types survive a round trip
  CHECK(a.find("1.0") != std::string::npos);
  // stable key order: insertion order, not alphabetical
  CHECK(a.find("name") < a.find("value"));
  CHECK(a.find("value") < a.find("nested"));
}
