#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mpbvp/errors.hpp"

namespace mpbvp {

/// Continuous trajectory produced by the adaptive integrator: solver-chosen
/// mesh nodes with states and derivatives, evaluated anywhere by cubic
/// Hermite interpolation on each step. Immutable and cheap to copy.
class DenseOutput {
 public:
  DenseOutput() = default;
  DenseOutput(int dim, std::vector<double> mesh, std::vector<double> states,
              std::vector<double> derivs);

  int dim() const { return dim_; }
  std::size_t nodes() const { return s_ ? s_->mesh.size() : 0; }
  double t_begin() const { return s_->mesh.front(); }
  double t_end() const { return s_->mesh.back(); }
  std::span<const double> mesh() const { return s_->mesh; }
  std::span<const double> state(std::size_t node) const;
  std::span<const double> deriv(std::size_t node) const;

  /// Evaluate y(t). Node values are reproduced exactly; queries slightly
  /// outside the mesh extrapolate the boundary cubic.
  void eval(double t, std::span<double> out) const;
  std::vector<double> eval(double t) const;

 private:
  struct Storage {
    std::vector<double> mesh;
    std::vector<double> states;  // nodes x dim, row major
    std::vector<double> derivs;
  };
  std::size_t locate(double t) const;

  int dim_ = 0;
  std::shared_ptr<const Storage> s_;
};

}  // namespace mpbvp
