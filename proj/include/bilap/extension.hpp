#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "bilap/errors.hpp"

namespace bilap {

/// u0(x) = sum_k a_k cos(k x) on the 2 pi periodic line.
struct FourierTrace {
  std::vector<double> a;

  int max_mode() const { return static_cast<int>(a.size()) - 1; }
};

/// Fourier multiplier |k|^3.
inline FourierTrace spectral_frac32(const FourierTrace& t) {
  FourierTrace out = t;
  for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] *= static_cast<double>(k * k * k);
  return out;
}

/// Biharmonic extension of a trace into the strip [0, 2 pi) x [0, Y] with u_y = 0 at y = 0
/// and u = u_y = 0 at y = Y, mode by mode on a uniform y grid.
struct StripExtension {
  double height = 0.0;
  double dy = 0.0;
  std::vector<int> modes;
  std::vector<std::vector<double>> profile;  ///< profile[m][j] = U_k(j dy) for k = modes[m]

  double operator()(double x, double y) const {
    const double s = y / dy;
    const auto j = static_cast<std::size_t>(std::min(std::floor(s), static_cast<double>(profile.front().size() - 2)));
    const double t = s - static_cast<double>(j);
    double acc = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const double U = (1.0 - t) * profile[m][j] + t * profile[m][j + 1];
      acc += U * std::cos(modes[m] * x);
    }
    return acc;
  }
};

namespace detail {

/// U'''' - 2k^2 U'' + k^4 U = 0 on [0, Y] with U(0) = a, U'(0) = 0, U(Y) = U'(Y) = 0.
/// Second-order differences; the slope conditions enter through mirrored ghost points.
inline Eigen::VectorXd solve_mode(int k, double a, double Y, double dy, double* residual = nullptr) {
  const int N = static_cast<int>(std::lround(Y / dy));
  const double k2 = static_cast<double>(k) * k;
  const double c4 = 1.0 / std::pow(dy, 4), c2 = -2.0 * k2 / (dy * dy), c0 = k2 * k2;
  // Interior unknowns U_1 .. U_{N-1}; U_0 = a and U_N = 0 are known.
  const int m = N - 1;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  // Row for node j: c4 (U_{j-2} - 4U_{j-1} + 6U_j - 4U_{j+1} + U_{j+2}) + c2 (U_{j-1} - 2U_j + U_{j+1}) + c0 U_j
  const double w[5] = {c4, -4.0 * c4 + c2, 6.0 * c4 - 2.0 * c2 + c0, -4.0 * c4 + c2, c4};
  auto add = [&](int row, int node, double coef) {
    // ghosts: U_{-1} = U_1, U_{N+1} = U_{N-1}
    if (node == -1) node = 1;
    if (node == N + 1) node = N - 1;
    if (node == 0) {
      rhs[row - 1] -= coef * a;
    } else if (node == N) {
      // U_N = 0
    } else {
      trip.emplace_back(row - 1, node - 1, coef);
    }
  };
  for (int j = 1; j <= N - 1; ++j) {
    for (int s = -2; s <= 2; ++s) add(j, j + s, w[s + 2]);
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw DiagnosticError("strip_extension: mode system is singular");
  const Eigen::VectorXd x = lu.solve(rhs);
  Eigen::VectorXd U(N + 1);
  U[0] = a;
  U.segment(1, m) = x;
  U[N] = 0.0;
  if (residual != nullptr) {
    const double scale = std::max({c4, std::abs(c2), c0}) * std::max(std::abs(a), 1e-300);
    *residual = (A * x - rhs).cwiseAbs().maxCoeff() / scale;
  }
  return U;
}

}  // namespace detail

inline constexpr double kMinPointsPerWavelength = 8.0;

/// points_per_unit sets dy = 1 / points_per_unit. The constant mode is extended as a constant.
inline StripExtension strip_extension(const FourierTrace& trace, double Y, double points_per_unit = 200.0) {
  if (Y < 8.0) throw ConfigError("strip_extension: height must be >= 8");
  if (trace.a.empty()) throw ConfigError("strip_extension: empty trace");
  const double dy = 1.0 / points_per_unit;
  StripExtension ext;
  ext.height = Y;
  ext.dy = dy;
  const int N = static_cast<int>(std::lround(Y / dy));
  for (int k = 0; k <= trace.max_mode(); ++k) {
    const double ak = trace.a[static_cast<std::size_t>(k)];
    if (ak == 0.0) continue;
    if (k > 0 && 2.0 * std::numbers::pi / k * points_per_unit < kMinPointsPerWavelength) {
      throw ConfigError("strip_extension: mode " + std::to_string(k) + " under-resolved");
    }
    ext.modes.push_back(k);
    if (k == 0) {
      ext.profile.emplace_back(static_cast<std::size_t>(N + 1), ak);
    } else {
      const Eigen::VectorXd U = detail::solve_mode(k, ak, Y, dy);
      ext.profile.emplace_back(U.data(), U.data() + U.size());
    }
  }
  if (ext.modes.empty()) {
    ext.modes.push_back(0);
    ext.profile.emplace_back(static_cast<std::size_t>(N + 1), 0.0);
  }
  return ext;
}

/// Relative discrete residual of the per-mode biharmonic equation, max over modes.
inline double biharmonic_residual(const FourierTrace& trace, double Y, double points_per_unit = 200.0) {
  double worst = 0.0;
  for (int k = 1; k <= trace.max_mode(); ++k) {
    const double ak = trace.a[static_cast<std::size_t>(k)];
    if (ak == 0.0) continue;
    double r = 0.0;
    detail::solve_mode(k, ak, Y, 1.0 / points_per_unit, &r);
    worst = std::max(worst, r);
  }
  return worst;
}

/// d/dy of the Laplacian at y = 0 for each mode: U'''(0) - k^2 U'(0), with U'(0) = 0 and a
/// second-order one-sided third difference.
inline std::vector<double> dtn_values(const StripExtension& ext) {
  std::vector<double> out;
  const double dy = ext.dy;
  for (const auto& U : ext.profile) {
    out.push_back((-5.0 * U[0] + 18.0 * U[1] - 24.0 * U[2] + 14.0 * U[3] - 3.0 * U[4]) / (2.0 * dy * dy * dy));
  }
  return out;
}

struct DtnReport {
  std::vector<int> modes;
  std::vector<double> ratio;  ///< projected d_y Delta u(., 0) over |k|^3 a_k
  double calibrated = 0.0;    ///< mean ratio, the calibrated 1 / C_n
  double spread = 0.0;        ///< (max - min) / mean
};

/// Compares the extension's boundary flux d_y Delta u(., 0) against (-Delta)^{3/2} u0 mode by mode.
/// The flux is assembled on a uniform x grid and projected back onto cos(k x).
inline DtnReport dtn_compare(const FourierTrace& trace, double Y, double points_per_unit = 200.0) {
  bool any = false;
  for (int k = 1; k <= trace.max_mode(); ++k) any = any || trace.a[static_cast<std::size_t>(k)] != 0.0;
  if (!any) throw ConfigError("dtn_compare: trace has no nonzero mode with k >= 1");
  const StripExtension ext = strip_extension(trace, Y, points_per_unit);
  const std::vector<double> flux_modes = dtn_values(ext);
  const FourierTrace target = spectral_frac32(trace);

  const int nx = 8 * (trace.max_mode() + 1);
  std::vector<double> flux(static_cast<std::size_t>(nx), 0.0);
  for (int i = 0; i < nx; ++i) {
    const double x = 2.0 * std::numbers::pi * i / nx;
    for (std::size_t m = 0; m < ext.modes.size(); ++m) flux[static_cast<std::size_t>(i)] += flux_modes[m] * std::cos(ext.modes[m] * x);
  }
  DtnReport rep;
  double lo = 1e300, hi = -1e300, sum = 0.0;
  for (int k = 1; k <= trace.max_mode(); ++k) {
    if (trace.a[static_cast<std::size_t>(k)] == 0.0) continue;
    double proj = 0.0;
    for (int i = 0; i < nx; ++i) proj += flux[static_cast<std::size_t>(i)] * std::cos(k * 2.0 * std::numbers::pi * i / nx);
    proj *= 2.0 / nx;
    const double r = proj / target.a[static_cast<std::size_t>(k)];
    rep.modes.push_back(k);
    rep.ratio.push_back(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
  }
  rep.calibrated = sum / static_cast<double>(rep.ratio.size());
  rep.spread = (hi - lo) / std::abs(rep.calibrated);
  return rep;
}

}  // namespace bilap
