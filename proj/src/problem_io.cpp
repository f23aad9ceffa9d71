#include "mpbvp/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mpbvp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, where + ": " + what);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Mat parse_numeric_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(where, "expected an array of " + std::to_string(n) + " rows");
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(where, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      entries.push_back(as_number(row[c], where + "[" + std::to_string(i) + "][" +
                                              std::to_string(c) + "]"));
  }
  return Mat(n, n, std::move(entries));
}

Expr parse_entry(const json& j, std::span<const std::string> vars,
                 const std::string& where) {
  if (!j.is_string()) fail(where, "expected an expression string");
  try {
    return Expr::parse(j.get<std::string>(), vars);
  } catch (const ParseError& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
}

ExprMatrix parse_expr_matrix(const json& j, int n,
                             std::span<const std::string> vars,
                             const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(where, "expected an array of " + std::to_string(n) + " rows");
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      fail(where, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      entries.push_back(parse_entry(row[c], vars,
                                    where + "[" + std::to_string(i) + "][" +
                                        std::to_string(c) + "]"));
  }
  return ExprMatrix(n, n, std::move(entries));
}

ExprVector parse_expr_vector(const json& j, int n,
                             std::span<const std::string> vars,
                             const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    fail(where, "expected an array of " + std::to_string(n) + " expression strings");
  std::vector<Expr> entries;
  entries.reserve(n);
  for (int i = 0; i < n; ++i)
    entries.push_back(parse_entry(j[i], vars, where + "[" + std::to_string(i) + "]"));
  return ExprVector(std::move(entries));
}

bool looks_like_series_of_matrices(const json& j) {
  // single matrix: [[str,...],...]; series: [[[str,...],...],...]
  return j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() &&
         j[0][0].is_array();
}

bool looks_like_series_of_vectors(const json& j) {
  return j.is_array() && !j.empty() && j[0].is_array();
}

}  // namespace

BvpProblem parse_problem_json(const std::string& text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError,
                source_name + ": " + e.what());
  }
  if (!doc.is_object()) fail(source_name, "top level must be an object");

  BvpProblem p;
  p.source = source_name;

  if (!doc.contains("n") || !doc["n"].is_number_integer())
    fail(source_name, "field 'n' (integer) is required");
  p.n = doc["n"].get<int>();
  if (p.n <= 0) fail(source_name, "'n' must be positive");

  if (doc.contains("mode")) {
    std::string mode = doc["mode"].get<std::string>();
    if (mode == "linear") p.mode = ProblemMode::Linear;
    else if (mode == "quasilinear") p.mode = ProblemMode::QuasiLinear;
    else fail(source_name, "'mode' must be \"linear\" or \"quasilinear\"");
  }

  // variable scopes: matrix entries see {t, eps}; forcing entries add the
  // state names in quasi-linear mode
  std::vector<std::string> mat_vars{"t", "eps"};
  std::vector<std::string> f_vars{"t", "eps"};
  if (p.mode == ProblemMode::QuasiLinear)
    for (int i = 1; i <= p.n; ++i) f_vars.push_back("x" + std::to_string(i));

  if (!doc.contains("A")) fail(source_name, "field 'A' is required");
  if (looks_like_series_of_matrices(doc["A"])) {
    int k = 0;
    for (const json& term : doc["A"])
      p.a_terms.push_back(parse_expr_matrix(term, p.n, mat_vars,
                                            "A[" + std::to_string(k++) + "]"));
  } else {
    p.a_terms.push_back(parse_expr_matrix(doc["A"], p.n, mat_vars, "A"));
  }

  if (!doc.contains("f")) fail(source_name, "field 'f' is required");
  if (looks_like_series_of_vectors(doc["f"])) {
    int k = 0;
    for (const json& term : doc["f"])
      p.f_terms.push_back(parse_expr_vector(term, p.n, f_vars,
                                            "f[" + std::to_string(k++) + "]"));
  } else {
    p.f_terms.push_back(parse_expr_vector(doc["f"], p.n, f_vars, "f"));
  }

  if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].empty())
    fail(source_name, "field 'points' (nonempty array) is required");
  int j = 0;
  for (const json& pt : doc["points"]) {
    std::string where = "points[" + std::to_string(j++) + "]";
    if (!pt.is_object() || !pt.contains("t") || !pt.contains("F"))
      fail(where, "expected an object with 't' and 'F'");
    BoundaryPoint bp;
    bp.t = as_number(pt["t"], where + ".t");
    bp.f = parse_numeric_matrix(pt["F"], p.n, where + ".F");
    p.points.push_back(std::move(bp));
  }

  if (!doc.contains("alpha") || !doc["alpha"].is_array() ||
      static_cast<int>(doc["alpha"].size()) != p.n)
    fail(source_name, "field 'alpha' must be an array of n numbers");
  for (int i = 0; i < p.n; ++i)
    p.alpha.push_back(as_number(doc["alpha"][i], "alpha[" + std::to_string(i) + "]"));

  if (doc.contains("eps")) p.eps = as_number(doc["eps"], "eps");

  if (doc.contains("B"))
    p.picard_base = parse_expr_matrix(doc["B"], p.n, mat_vars, "B");

  if (doc.contains("split")) {
    if (!doc["split"].is_array()) fail(source_name, "'split' must be an array of matrices");
    std::vector<Mat> parts;
    int k = 0;
    for (const json& part : doc["split"])
      parts.push_back(parse_numeric_matrix(part, p.n, "split[" + std::to_string(k++) + "]"));
    p.split = std::move(parts);
  }

  p.validate();
  if (p.split) SplitScheme::from_matrices(*p.split);  // checks the identity sum
  return p;
}

BvpProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open problem file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_json(buf.str(), path.string());
}

}  // namespace mpbvp
