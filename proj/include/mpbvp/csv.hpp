#pragma once

#include <filesystem>
#include <iosfwd>

#include "mpbvp/verify.hpp"

namespace mpbvp {

/// Write solution samples on a uniform grid: header "t,x1,...,xn", numbers
/// with 15 significant digits.
void write_solution_csv(std::ostream& out, const SolutionEvaluator& x, int n,
                        int rows = 201);
void write_solution_csv_file(const std::filesystem::path& path,
                             const SolutionEvaluator& x, int n, int rows = 201);

/// Sampled solution read back from CSV; evaluable by piecewise-cubic
/// interpolation on the stored abscissas.
class CsvSolution {
 public:
  CsvSolution(std::vector<double> ts, std::vector<std::vector<double>> states);

  int dim() const { return dim_; }
  std::size_t rows() const { return ts_.size(); }
  std::vector<double> eval(double t) const;
  SolutionEvaluator evaluator() const;

 private:
  int dim_ = 0;
  std::vector<double> ts_;
  std::vector<std::vector<double>> states_;
};

/// Throws Error(IoError) on unreadable files and Error(DimensionMismatch)
/// when the column count does not match the expected dimension.
CsvSolution read_solution_csv(const std::filesystem::path& path, int expected_n);

}  // namespace mpbvp
