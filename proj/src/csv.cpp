#include "mpbvp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mpbvp {

namespace {

std::string format15(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

void write_solution_csv(std::ostream& out, const SolutionEvaluator& x, int n,
                        int rows) {
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << "\n";
  for (int r = 0; r < rows; ++r) {
    double t = static_cast<double>(r) / (rows - 1);
    auto v = x(t);
    out << format15(t);
    for (int i = 0; i < n; ++i) out << "," << format15(v[i]);
    out << "\n";
  }
}

void write_solution_csv_file(const std::filesystem::path& path,
                             const SolutionEvaluator& x, int n, int rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_solution_csv(out, x, n, rows);
}

CsvSolution::CsvSolution(std::vector<double> ts,
                         std::vector<std::vector<double>> states)
    : ts_(std::move(ts)), states_(std::move(states)) {
  if (ts_.size() < 4)
    throw Error(ErrorCode::InvalidInput, "need at least 4 sample rows");
  if (states_.size() != ts_.size())
    throw Error(ErrorCode::InvalidInput, "sample arrays are inconsistent");
  dim_ = static_cast<int>(states_.front().size());
  for (std::size_t i = 1; i < ts_.size(); ++i)
    if (!(ts_[i] > ts_[i - 1]))
      throw Error(ErrorCode::InvalidInput, "sample abscissas must increase strictly");
}

std::vector<double> CsvSolution::eval(double t) const {
  const int last = static_cast<int>(ts_.size()) - 1;
  auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  int cell = std::clamp(static_cast<int>(it - ts_.begin()) - 1, 0, last - 1);
  int i0 = std::clamp(cell - 1, 0, last - 3);
  std::vector<double> out(dim_, 0.0);
  for (int a = 0; a < 4; ++a) {
    double num = 1.0, den = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      num *= t - ts_[i0 + b];
      den *= ts_[i0 + a] - ts_[i0 + b];
    }
    double w = num / den;
    for (int k = 0; k < dim_; ++k) out[k] += w * states_[i0 + a][k];
  }
  return out;
}

SolutionEvaluator CsvSolution::evaluator() const {
  CsvSolution copy = *this;
  return [copy](double t) { return copy.eval(t); };
}

CsvSolution read_solution_csv(const std::filesystem::path& path, int expected_n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::IoError, path.string() + ": empty file");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    return out;
  };

  auto header = split(line);
  if (header.empty() || header.front() != "t" ||
      static_cast<int>(header.size()) != expected_n + 1)
    throw Error(ErrorCode::DimensionMismatch,
                path.string() + ": header must be t,x1,...,x" +
                    std::to_string(expected_n));

  std::vector<double> ts;
  std::vector<std::vector<double>> states;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split(line);
    if (static_cast<int>(cells.size()) != expected_n + 1)
      throw Error(ErrorCode::DimensionMismatch,
                  path.string() + ": row " + std::to_string(row) +
                      " has the wrong column count");
    std::vector<double> state(expected_n);
    char* end = nullptr;
    double t = std::strtod(cells[0].c_str(), &end);
    if (end == cells[0].c_str() || !std::isfinite(t))
      throw Error(ErrorCode::IoError,
                  path.string() + ": row " + std::to_string(row) + ": bad number");
    for (int i = 0; i < expected_n; ++i) {
      state[i] = std::strtod(cells[i + 1].c_str(), &end);
      if (end == cells[i + 1].c_str() || !std::isfinite(state[i]))
        throw Error(ErrorCode::IoError,
                    path.string() + ": row " + std::to_string(row) + ": bad number");
    }
    ts.push_back(t);
    states.push_back(std::move(state));
  }
  return CsvSolution(std::move(ts), std::move(states));
}

}  // namespace mpbvp
