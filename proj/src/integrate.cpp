#include "mpbvp/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mpbvp {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kMinStep = 1e-14;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 5.0;

struct Leg {
  std::vector<double> mesh;    // internal variable, ascending from 0
  std::vector<double> states;  // nodes x dim
  std::vector<double> derivs;  // du/dsigma at nodes
};

void check_tolerances(const IvpOptions& opts) {
  // atol == 0 selects pure relative control (used for fundamental matrices)
  if (!(opts.rtol > 0.0) || !(opts.atol >= 0.0) || opts.rtol > 1e-2 || opts.atol > 1e-2)
    throw Error(ErrorCode::InvalidInput, "tolerances must lie in (0, 1e-2]");
}

// Component scale mixes in a fraction of the state norm so that entries
// passing through zero do not stall the controller, while a uniformly
// decaying state (a contracting fundamental matrix) keeps full relative
// control all the way down. Required for the eps-scaled problems, where the
// anchored integrals grow like the inverse of Phi and would otherwise
// amplify absolute-floor noise back to O(1).
constexpr double kNormMix = 1e-3;

// overflow-safe root mean square (states can reach the top of double range)
double state_rms(std::span<const double> y) {
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::fabs(v));
  if (peak == 0.0 || !std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : y) {
    double q = v / peak;
    sum += q * q;
  }
  return peak * std::sqrt(sum / static_cast<double>(y.size()));
}

double error_norm(std::span<const double> err, std::span<const double> y0,
                  std::span<const double> y1, double rtol, double atol) {
  double rms = state_rms(y0);
  double sum = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    double sc = atol + rtol * std::max({std::fabs(y0[i]), std::fabs(y1[i]),
                                        kNormMix * rms});
    if (sc == 0.0) {
      if (err[i] == 0.0) continue;
      return std::numeric_limits<double>::infinity();
    }
    double q = err[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(err.size()));
}

std::vector<double> component_scales(std::span<const double> y, double rtol,
                                     double atol) {
  double rms = state_rms(y);
  std::vector<double> sc(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    sc[i] = atol + rtol * std::max(std::fabs(y[i]), kNormMix * rms);
  return sc;
}

double initial_step(const OdeField& g, double length, std::span<const double> u0,
                    std::span<const double> k1, double rtol, double atol) {
  const std::size_t d = u0.size();
  std::vector<double> sc = component_scales(u0, rtol, atol);
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (sc[i] == 0.0) continue;
    double q0 = u0[i] / sc[i], q1 = k1[i] / sc[i];
    d0 += q0 * q0;
    d1 += q1 * q1;
  }
  d0 = std::sqrt(d0 / d);
  d1 = std::sqrt(d1 / d);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, length);
  std::vector<double> u1(d), k2(d);
  for (std::size_t i = 0; i < d; ++i) u1[i] = u0[i] + h0 * k1[i];
  g(h0, u1, k2);
  double d2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (sc[i] == 0.0) continue;
    double q = (k2[i] - k1[i]) / sc[i];
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / d) / h0;
  double h1;
  if (std::max(d1, d2) <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min({100.0 * h0, h1, length});
}

// One adaptive leg in an internal nonnegative variable sigma in [0, length].
// `report_t` maps sigma to the user's time axis for diagnostics.
Leg integrate_leg(const OdeField& g, std::span<const double> u0, double length,
                  const IvpOptions& opts,
                  const std::function<double(double)>& report_t) {
  const std::size_t d = u0.size();
  Leg leg;
  std::vector<double> u(u0.begin(), u0.end());
  std::vector<double> k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
  std::vector<double> work(d), unew(d), err(d);

  g(0.0, u, k1);
  leg.mesh.push_back(0.0);
  leg.states.insert(leg.states.end(), u.begin(), u.end());
  leg.derivs.insert(leg.derivs.end(), k1.begin(), k1.end());

  double sigma = 0.0;
  double h = initial_step(g, length, u, k1, opts.rtol, opts.atol);
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  bool rejected_last = false;
  std::size_t steps = 0;

  while (sigma < length) {
    if (steps++ >= opts.max_steps)
      throw StiffnessError("step cap exceeded", report_t(sigma));
    if (h < kMinStep)
      throw StiffnessError("step size underflow", report_t(sigma));

    bool last = false;
    if (sigma + 1.01 * h >= length) {
      h = length - sigma;
      last = true;
    }

    for (std::size_t i = 0; i < d; ++i) work[i] = u[i] + h * a21 * k1[i];
    g(sigma + c2 * h, work, k2);
    for (std::size_t i = 0; i < d; ++i)
      work[i] = u[i] + h * (a31 * k1[i] + a32 * k2[i]);
    g(sigma + c3 * h, work, k3);
    for (std::size_t i = 0; i < d; ++i)
      work[i] = u[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    g(sigma + c4 * h, work, k4);
    for (std::size_t i = 0; i < d; ++i)
      work[i] = u[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    g(sigma + c5 * h, work, k5);
    for (std::size_t i = 0; i < d; ++i)
      work[i] = u[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    g(sigma + h, work, k6);
    for (std::size_t i = 0; i < d; ++i)
      unew[i] = u[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    g(sigma + h, unew, k7);

    for (std::size_t i = 0; i < d; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * k7[i]);
    bool finite = true;
    for (double v : unew)
      if (!std::isfinite(v)) finite = false;
    double en = finite ? error_norm(err, u, unew, opts.rtol, opts.atol)
                       : std::numeric_limits<double>::infinity();
    if (!std::isfinite(en)) {
      h *= kFacMin;
      rejected_last = true;
      continue;
    }

    if (en <= 1.0) {
      sigma = last ? length : sigma + h;
      u = unew;
      k1 = k7;
      leg.mesh.push_back(sigma);
      leg.states.insert(leg.states.end(), u.begin(), u.end());
      leg.derivs.insert(leg.derivs.end(), k1.begin(), k1.end());
      double fac = (en == 0.0)
                       ? kFacMax
                       : std::clamp(kSafety * std::pow(en, -0.2), kFacMin,
                                    rejected_last ? 1.0 : kFacMax);
      h *= fac;
      if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
      rejected_last = false;
      if (last) break;
    } else {
      double fac = std::clamp(kSafety * std::pow(en, -0.2), kFacMin, 1.0);
      h *= fac;
      rejected_last = true;
    }
  }
  return leg;
}

}  // namespace

DenseOutput integrate_ivp(const OdeField& field, double t0,
                          std::span<const double> y0, double t_begin,
                          double t_end, const IvpOptions& opts) {
  check_tolerances(opts);
  if (!(t_begin < t_end))
    throw Error(ErrorCode::InvalidInput, "integration span must be nonempty");
  if (t0 < t_begin || t0 > t_end)
    throw Error(ErrorCode::InvalidInput, "initial time outside the span");
  const std::size_t d = y0.size();

  std::vector<double> mesh;
  std::vector<double> states;
  std::vector<double> derivs;

  if (t0 > t_begin) {
    // backward leg in the reversed variable sigma = t0 - t
    OdeField g = [&](double sigma, std::span<const double> u, std::span<double> du) {
      field(t0 - sigma, u, du);
      for (double& v : du) v = -v;
    };
    Leg leg = integrate_leg(g, y0, t0 - t_begin, opts,
                            [&](double sigma) { return t0 - sigma; });
    // reverse to ascending t; dy/dt = -du/dsigma
    const std::size_t m = leg.mesh.size();
    for (std::size_t r = m; r-- > 0;) {
      mesh.push_back(r == m - 1 ? t_begin : t0 - leg.mesh[r]);
      for (std::size_t k = 0; k < d; ++k) states.push_back(leg.states[r * d + k]);
      for (std::size_t k = 0; k < d; ++k) derivs.push_back(-leg.derivs[r * d + k]);
    }
  } else {
    mesh.push_back(t0);
    states.insert(states.end(), y0.begin(), y0.end());
    std::vector<double> dy(d);
    field(t0, y0, dy);
    derivs.insert(derivs.end(), dy.begin(), dy.end());
  }

  if (t0 < t_end) {
    OdeField g = [&](double sigma, std::span<const double> u, std::span<double> du) {
      field(t0 + sigma, u, du);
    };
    Leg leg = integrate_leg(g, y0, t_end - t0, opts,
                            [&](double sigma) { return t0 + sigma; });
    const std::size_t m = leg.mesh.size();
    for (std::size_t r = 1; r < m; ++r) {  // node 0 duplicates t0
      mesh.push_back(r == m - 1 ? t_end : t0 + leg.mesh[r]);
      for (std::size_t k = 0; k < d; ++k) states.push_back(leg.states[r * d + k]);
      for (std::size_t k = 0; k < d; ++k) derivs.push_back(leg.derivs[r * d + k]);
    }
  }

  return DenseOutput(static_cast<int>(d), std::move(mesh), std::move(states),
                     std::move(derivs));
}

DenseOutput fundamental_matrix(const MatrixFunction& a, int n,
                               const IvpOptions& opts) {
  if (n <= 0) throw Error(ErrorCode::InvalidInput, "dimension must be positive");
  OdeField field = [&](double t, std::span<const double> y, std::span<double> dy) {
    Mat at = a(t);
    if (at.rows() != n || at.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "system matrix has wrong shape");
    // dY = A(t) * Y with Y stored row major
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += at(i, k) * y[static_cast<std::size_t>(k) * n + j];
        dy[static_cast<std::size_t>(i) * n + j] = s;
      }
    }
  };
  std::vector<double> y0(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) y0[static_cast<std::size_t>(i) * n + i] = 1.0;
  // Pure relative control: a contracting Phi must stay accurate relative to
  // its own (possibly tiny) magnitude, since the anchored integrals are later
  // multiplied back against it. An absolute floor would let Phi saturate and
  // return a plausible-looking but wrong product; with atol = 0 a genuinely
  // exhausted dynamic range fails as a step-size underflow instead.
  IvpOptions phi_opts = opts;
  phi_opts.atol = 0.0;
  return integrate_ivp(field, 0.0, y0, 0.0, 1.0, phi_opts);
}

Mat eval_matrix(const DenseOutput& phi, int n, double t) {
  std::vector<double> flat(static_cast<std::size_t>(n) * n);
  phi.eval(t, flat);
  Mat m(n, n);
  std::copy(flat.begin(), flat.end(), m.data().begin());
  return m;
}

DenseOutput anchored_integral(const DenseOutput& phi, int n,
                              const VectorField& f, double anchor,
                              const IvpOptions& opts) {
  if (anchor < 0.0 || anchor > 1.0)
    throw Error(ErrorCode::InvalidInput, "anchor outside [0,1]");
  std::vector<double> fval(n);
  std::vector<double> flat(static_cast<std::size_t>(n) * n);
  OdeField field = [&](double t, std::span<const double>, std::span<double> dv) {
    phi.eval(t, flat);
    Mat m(n, n);
    std::copy(flat.begin(), flat.end(), m.data().begin());
    f(t, fval);
    LuFactor lu = LuFactor::factor(m);  // singular Phi surfaces here
    std::copy(fval.begin(), fval.end(), dv.begin());
    lu.solve_in_place(dv);
  };
  std::vector<double> zero(n, 0.0);
  return integrate_ivp(field, anchor, zero, 0.0, 1.0, opts);
}

std::vector<DenseOutput> anchored_integrals(const DenseOutput& phi, int n,
                                            const VectorField& f,
                                            std::span<const double> anchors,
                                            const IvpOptions& opts) {
  for (std::size_t k = 1; k < anchors.size(); ++k)
    if (!(anchors[k] > anchors[k - 1]))
      throw Error(ErrorCode::InvalidInput, "anchors must increase strictly");
  std::vector<DenseOutput> out;
  out.reserve(anchors.size());
  for (double a : anchors) out.push_back(anchored_integral(phi, n, f, a, opts));
  return out;
}

std::vector<double> FundamentalSolution::v_at(std::size_t k, double t) const {
  if (k >= v.size() || !v[k])
    throw Error(ErrorCode::InvalidInput, "anchored integral was not computed");
  return v[k]->eval(t);
}

FundamentalSolution build_fundamental_solution(
    const MatrixFunction& a, const VectorField& f, int n,
    std::span<const double> anchors, const std::vector<bool>& needed,
    const IvpOptions& opts) {
  FundamentalSolution fs;
  fs.n = n;
  fs.rtol = opts.rtol;
  fs.atol = opts.atol;
  fs.anchors.assign(anchors.begin(), anchors.end());
  fs.phi = fundamental_matrix(a, n, opts);
  fs.v.resize(anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    if (!needed.empty() && !needed[k]) continue;
    fs.v[k] = anchored_integral(fs.phi, n, f, anchors[k], opts);
  }
  return fs;
}

}  // namespace mpbvp
