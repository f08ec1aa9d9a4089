#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"
#include "bilap/grid.hpp"

namespace bilap {

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count) {
  std::vector<double> x(count), w(count);
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= count; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[count - 1 - i] = z;
    w[i] = w[count - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

struct QuadratureNode {
  Point z;
  double w;
};

/// Sample sets on a half ball centered on the thin space:
///  surface: (dB_r)^+ with dS,  solid: B_r^+ with dx dy,  thin: B_r' with dx.
struct SphereQuadrature {
  Point center{};
  double radius = 0.0;
  int n = 1;
  std::vector<QuadratureNode> surface;
  std::vector<QuadratureNode> solid;
  std::vector<QuadratureNode> thin;

  /// Unit outward normal of the sphere at a surface sample.
  Point normal(const Point& z) const { return (1.0 / radius) * (z - center); }
};

inline double integrate(const std::vector<QuadratureNode>& nodes, const std::function<double(const Point&)>& f) {
  double acc = 0.0;
  for (const auto& q : nodes) acc += q.w * f(q.z);
  return acc;
}

/// Builds the sample sets without checking them against a grid (closed-form fields).
/// m is the angular sample count; radial and polar directions use m/4 Gauss points.
inline SphereQuadrature make_quadrature(int n, const Point& center, double r, int m) {
  if (n != 1 && n != 2) throw ConfigError("quadrature: n must be 1 or 2");
  if (!(r > 0.0)) throw ConfigError("quadrature: radius must be positive");
  if (m < 8) throw ConfigError("quadrature: sample count too small");
  constexpr double pi = std::numbers::pi;
  SphereQuadrature q;
  q.center = center;
  q.radius = r;
  q.n = n;
  const int m_radial = std::max(8, m / 4);
  const auto [gx, gw] = gauss_legendre(m_radial);

  if (n == 1) {
    const double dth = pi / m;
    q.surface.reserve(m);
    for (int k = 0; k < m; ++k) {
      const double th = (k + 0.5) * dth;
      q.surface.push_back({center + Point{r * std::cos(th), 0.0, r * std::sin(th)}, r * dth});
    }
    q.solid.reserve(static_cast<std::size_t>(m) * m_radial);
    for (int a = 0; a < m_radial; ++a) {
      const double rho = 0.5 * r * (gx[a] + 1.0);
      const double wr = 0.5 * r * gw[a] * rho;
      for (int k = 0; k < m; ++k) {
        const double th = (k + 0.5) * dth;
        q.solid.push_back({center + Point{rho * std::cos(th), 0.0, rho * std::sin(th)}, wr * dth});
      }
    }
    // Two Gauss panels meeting at the center, where free-boundary kinks sit.
    const int half = std::max(4, m / 2);
    const auto [tx, tw] = gauss_legendre(half);
    q.thin.reserve(2 * half);
    for (int side = -1; side <= 1; side += 2) {
      for (int a = 0; a < half; ++a) {
        const double s = 0.5 * r * (tx[a] + 1.0);
        q.thin.push_back({center + Point{side * s, 0.0, 0.0}, 0.5 * r * tw[a]});
      }
    }
  } else {
    const double dbeta = 2.0 * pi / m;
    // Hemisphere directions: t = cos(alpha) in [0, 1] by Gauss, azimuth by midpoints.
    std::vector<std::pair<Point, double>> dirs;
    dirs.reserve(static_cast<std::size_t>(m) * m_radial);
    for (int a = 0; a < m_radial; ++a) {
      const double t = 0.5 * (gx[a] + 1.0);
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int k = 0; k < m; ++k) {
        const double b = (k + 0.5) * dbeta;
        dirs.push_back({Point{st * std::cos(b), st * std::sin(b), t}, 0.5 * gw[a] * dbeta});
      }
    }
    for (const auto& [d, w] : dirs) q.surface.push_back({center + r * d, r * r * w});
    for (int a = 0; a < m_radial; ++a) {
      const double rho = 0.5 * r * (gx[a] + 1.0);
      const double wr = 0.5 * r * gw[a] * rho * rho;
      for (const auto& [d, w] : dirs) q.solid.push_back({center + rho * d, wr * w});
    }
    for (int a = 0; a < m_radial; ++a) {
      const double rho = 0.5 * r * (gx[a] + 1.0);
      const double wr = 0.5 * r * gw[a] * rho;
      for (int k = 0; k < m; ++k) {
        const double b = (k + 0.5) * dbeta;
        q.thin.push_back({center + Point{rho * std::cos(b), rho * std::sin(b), 0.0}, wr * dbeta});
      }
    }
  }
  return q;
}

/// Checked construction: the half ball B_r(center)^+ must sit inside B_1^+ and be
/// resolved by the grid (r >= 4h); at least 64 angular samples.
inline SphereQuadrature sphere_quadrature(const HalfBallGrid& grid, const Point& center, double r, int m) {
  if (std::abs(center[kY]) > 0.0) throw ConfigError("quadrature: center must lie on the thin space y = 0");
  if (m < 64) throw ConfigError("quadrature: sample count m must be >= 64");
  if (r < 4.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw ConfigError("quadrature: radius " + std::to_string(r) + " below 4h (under-resolved)");
  }
  if (norm(center) + r > 1.0 + 1e-12) throw DomainError("quadrature: ball not contained in B_1");
  return make_quadrature(grid.dim(), center, r, m);
}

/// Average of f over the full sphere dB_rho(z) in R^{n+1} (both half spaces).
inline double sphere_average(int n, const Point& z, double rho, int samples,
                             const std::function<double(const Point&)>& f) {
  constexpr double pi = std::numbers::pi;
  double acc = 0.0;
  if (n == 1) {
    for (int k = 0; k < samples; ++k) {
      const double th = 2.0 * pi * (k + 0.5) / samples;
      acc += f(z + Point{rho * std::cos(th), 0.0, rho * std::sin(th)});
    }
    return acc / samples;
  }
  const int polar = std::max(8, samples / 4);
  const auto [gx, gw] = gauss_legendre(polar);
  for (int a = 0; a < polar; ++a) {
    const double st = std::sqrt(std::max(0.0, 1.0 - gx[a] * gx[a]));
    for (int k = 0; k < samples; ++k) {
      const double b = 2.0 * pi * (k + 0.5) / samples;
      acc += 0.5 * gw[a] / samples * f(z + rho * Point{st * std::cos(b), st * std::sin(b), gx[a]});
    }
  }
  return acc;
}

}  // namespace bilap
