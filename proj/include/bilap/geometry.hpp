#pragma once

#include <array>
#include <cmath>

namespace bilap {

/// Point or vector in R^{n+1}, stored as (x1, x2, y). For n = 1 the x2 slot stays 0,
/// so the vertical coordinate is always at index kY.
using Point = std::array<double, 3>;

inline constexpr int kY = 2;

/// Storage slot of the a-th ambient axis for thin dimension n (axes 0..n, the last is y).
inline constexpr int axis_slot(int n, int a) noexcept { return a == n ? kY : a; }

inline double dot(const Point& a, const Point& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Point& a) noexcept { return std::sqrt(dot(a, a)); }

inline Point operator+(const Point& a, const Point& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Point operator-(const Point& a, const Point& b) noexcept {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point operator*(double s, const Point& a) noexcept { return {s * a[0], s * a[1], s * a[2]}; }

/// Even reflection across the thin space {y = 0}.
inline Point mirror(const Point& a) noexcept { return {a[0], a[1], -a[2]}; }

/// Thin-space part x of z = (x, y).
inline Point thin_part(const Point& a) noexcept { return {a[0], a[1], 0.0}; }

}  // namespace bilap
