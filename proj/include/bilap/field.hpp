#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"
#include "bilap/grid.hpp"

namespace bilap {

enum class FieldRole { Solution, Laplacian, Residual, Rescaled, Generic };

/// One real value per grid node.
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;
  FieldRole role = FieldRole::Generic;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, FieldRole r = FieldRole::Generic)
      : grid(std::move(g)), values(grid->size(), 0.0), role(r) {}

  static ScalarField from_function(GridPtr g, const std::function<double(const Point&)>& f,
                                   FieldRole r = FieldRole::Generic) {
    ScalarField out(std::move(g), r);
    for (std::size_t id = 0; id < out.values.size(); ++id) out.values[id] = f(out.grid->position(id));
    return out;
  }

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t id) { return values[id]; }
  double operator[](std::size_t id) const { return values[id]; }

  double sup_norm() const {
    double s = 0.0;
    for (double x : values) s = std::max(s, std::abs(x));
    return s;
  }
};

/// Multilinear interpolation on the lattice cell containing z. Points with y < 0 are
/// evaluated through the even reflection, so interp(F, mirror(z)) == interp(F, z).
inline double interp(const ScalarField& field, Point z) {
  const HalfBallGrid& g = *field.grid;
  if (z[kY] < 0.0) z = mirror(z);
  const int n = g.dim();
  const int m = g.cells_per_unit();
  const double h = g.spacing();
  constexpr double eps = 1e-10;

  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a <= n; ++a) {
    const int s = axis_slot(n, a);
    const double t = z[s] / h;
    const int lo = (s == kY) ? 0 : -m;
    int b = static_cast<int>(std::floor(t));
    b = std::clamp(b, lo, m - 1);
    const double f = t - b;
    if (f < -eps || f > 1.0 + eps) {
      throw DomainError("interp: point outside grid coverage");
    }
    base[s] = b;
    frac[s] = std::clamp(f, 0.0, 1.0);
  }
  if (n == 1 && std::abs(z[1]) > eps) throw DomainError("interp: x2 must be 0 for n = 1");

  double acc = 0.0;
  const int corners = 1 << (n + 1);
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    LatticeIndex idx{base[0], base[1], base[kY]};
    for (int a = 0; a <= n; ++a) {
      const int s = axis_slot(n, a);
      const bool up = (c >> a) & 1;
      w *= up ? frac[s] : 1.0 - frac[s];
      if (up) {
        if (s == 0) ++idx.i;
        else if (s == 1) ++idx.j;
        else ++idx.k;
      }
    }
    if (w == 0.0) continue;
    const std::size_t id = g.find(idx);
    if (id == HalfBallGrid::npos) throw DomainError("interp: point outside grid coverage");
    acc += w * field.values[id];
  }
  return acc;
}

/// How the y-derivative is taken at thin nodes.
enum class ThinDerivative {
  Reflect,   ///< central difference across the even reflection (gives exactly 0)
  OneSided,  ///< forward difference into y > 0 (the one-sided trace derivative)
};

/// Nodal gradient by central differences; one-sided where a neighbor is missing.
inline std::array<ScalarField, 3> nodal_gradient(const ScalarField& w, ThinDerivative thin_rule) {
  const HalfBallGrid& g = *w.grid;
  std::array<ScalarField, 3> out{ScalarField(w.grid), ScalarField(w.grid), ScalarField(w.grid)};
  const double h = g.spacing();
  const int n = g.dim();
  for (std::size_t id = 0; id < g.size(); ++id) {
    for (int a = 0; a <= n; ++a) {
      const int s = axis_slot(n, a);
      const std::size_t plus = g.neighbor(id, a, +1);
      std::size_t minus = g.neighbor(id, a, -1);
      const bool on_thin = s == kY && g.lattice(id).k == 0;
      if (on_thin && thin_rule == ThinDerivative::OneSided) minus = HalfBallGrid::npos;
      double d = 0.0;
      if (plus != HalfBallGrid::npos && minus != HalfBallGrid::npos) {
        d = (w[plus] - w[minus]) / (2.0 * h);
      } else if (plus != HalfBallGrid::npos) {
        d = (w[plus] - w[id]) / h;
      } else if (minus != HalfBallGrid::npos) {
        d = (w[id] - w[minus]) / h;
      }
      out[s][id] = d;
    }
  }
  return out;
}

}  // namespace bilap
