#include "mpbvp/dense_output.hpp"

#include <algorithm>
#include <cmath>

namespace mpbvp {

DenseOutput::DenseOutput(int dim, std::vector<double> mesh,
                         std::vector<double> states, std::vector<double> derivs)
    : dim_(dim) {
  if (dim <= 0 || mesh.size() < 2)
    throw Error(ErrorCode::InvalidInput, "dense output needs at least two nodes");
  if (states.size() != mesh.size() * dim || derivs.size() != mesh.size() * dim)
    throw Error(ErrorCode::InvalidInput, "dense output arrays are inconsistent");
  for (std::size_t i = 1; i < mesh.size(); ++i) {
    if (!(mesh[i] > mesh[i - 1]))
      throw Error(ErrorCode::InvalidInput, "dense output mesh must increase strictly");
  }
  auto st = std::make_shared<Storage>();
  st->mesh = std::move(mesh);
  st->states = std::move(states);
  st->derivs = std::move(derivs);
  s_ = std::move(st);
}

std::span<const double> DenseOutput::state(std::size_t node) const {
  return {s_->states.data() + node * dim_, static_cast<std::size_t>(dim_)};
}

std::span<const double> DenseOutput::deriv(std::size_t node) const {
  return {s_->derivs.data() + node * dim_, static_cast<std::size_t>(dim_)};
}

std::size_t DenseOutput::locate(double t) const {
  const auto& mesh = s_->mesh;
  if (t <= mesh.front()) return 0;
  if (t >= mesh.back()) return mesh.size() - 2;
  auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
  return static_cast<std::size_t>(it - mesh.begin()) - 1;
}

void DenseOutput::eval(double t, std::span<double> out) const {
  if (!s_) throw Error(ErrorCode::InvalidInput, "empty dense output");
  const auto& mesh = s_->mesh;
  std::size_t i = locate(t);
  // exact node hits reproduce the stored state bit for bit
  if (t == mesh[i]) {
    auto y = state(i);
    std::copy(y.begin(), y.end(), out.begin());
    return;
  }
  if (t == mesh[i + 1]) {
    auto y = state(i + 1);
    std::copy(y.begin(), y.end(), out.begin());
    return;
  }
  const double h = mesh[i + 1] - mesh[i];
  const double th = (t - mesh[i]) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  auto y0 = state(i);
  auto y1 = state(i + 1);
  auto d0 = deriv(i);
  auto d1 = deriv(i + 1);
  for (int k = 0; k < dim_; ++k)
    out[k] = h00 * y0[k] + h10 * h * d0[k] + h01 * y1[k] + h11 * h * d1[k];
}

std::vector<double> DenseOutput::eval(double t) const {
  std::vector<double> out(dim_);
  eval(t, out);
  return out;
}

}  // namespace mpbvp
