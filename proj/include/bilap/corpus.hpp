#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "bilap/geometry.hpp"
#include "bilap/problem.hpp"
#include "bilap/sampled_field.hpp"

namespace bilap {

/// Re((x + i y)^k) in the plane (x = x1), with exact gradient and zero Laplacian.
inline SampledField harmonic_power(int k, const Point& center = Point{0, 0, 0}) {
  auto zc = [center](const Point& z) { return std::complex<double>(z[0] - center[0], z[kY] - center[kY]); };
  return analytic_field(
      [k, zc](const Point& z) { return std::real(std::pow(zc(z), k)); },
      [k, zc](const Point& z) {
        if (k == 0) return Point{0, 0, 0};
        const std::complex<double> d = static_cast<double>(k) * std::pow(zc(z), k - 1);
        return Point{d.real(), 0.0, -d.imag()};
      },
      [](const Point&) { return 0.0; });
}

inline SampledField sum(const SampledField& a, const SampledField& b, double scale_b = 1.0) {
  SampledField out;
  out.value = [a, b, scale_b](const Point& z) { return a(z) + scale_b * b(z); };
  out.gradient = [a, b, scale_b](const Point& z) { return a.gradient(z) + scale_b * b.gradient(z); };
  if (a.laplacian && b.laplacian) {
    out.laplacian = [a, b, scale_b](const Point& z) { return a.laplacian(z) + scale_b * b.laplacian(z); };
  }
  return out;
}

inline SampledField constant_field(double c) {
  return analytic_field([c](const Point&) { return c; }, [](const Point&) { return Point{0, 0, 0}; },
                        [](const Point&) { return 0.0; });
}

struct NamedField {
  std::string name;
  SampledField field;
};

/// Five fields on the plane half disk with exact gradients and Laplacians, all even in y.
/// Two of them have limited smoothness across x = 0, so quadrature error is visible.
inline std::vector<NamedField> identity_corpus() {
  std::vector<NamedField> out;
  out.push_back({"x^2-y^2", harmonic_power(2)});
  out.push_back({"exp(x)cos(y)", analytic_field(
                                     [](const Point& z) { return std::exp(z[0]) * std::cos(z[kY]); },
                                     [](const Point& z) {
                                       return Point{std::exp(z[0]) * std::cos(z[kY]), 0.0, -std::exp(z[0]) * std::sin(z[kY])};
                                     },
                                     [](const Point&) { return 0.0; })});
  out.push_back({"sin(2x)cosh(2y)", analytic_field(
                                        [](const Point& z) { return std::sin(2 * z[0]) * std::cosh(2 * z[kY]); },
                                        [](const Point& z) {
                                          return Point{2 * std::cos(2 * z[0]) * std::cosh(2 * z[kY]), 0.0,
                                                       2 * std::sin(2 * z[0]) * std::sinh(2 * z[kY])};
                                        },
                                        [](const Point&) { return 0.0; })});
  out.push_back({"|x|^3+xy^2", analytic_field(
                                   [](const Point& z) { return std::pow(std::abs(z[0]), 3) + z[0] * z[kY] * z[kY]; },
                                   [](const Point& z) {
                                     return Point{3 * z[0] * std::abs(z[0]) + z[kY] * z[kY], 0.0, 2 * z[0] * z[kY]};
                                   },
                                   [](const Point& z) { return 6 * std::abs(z[0]) + 2 * z[0]; })});
  out.push_back({"(x+)^4 cos(y)+y^2", analytic_field(
                                          [](const Point& z) {
                                            const double a = std::max(0.0, z[0]);
                                            return a * a * a * a * std::cos(z[kY]) + z[kY] * z[kY];
                                          },
                                          [](const Point& z) {
                                            const double a = std::max(0.0, z[0]);
                                            return Point{4 * a * a * a * std::cos(z[kY]), 0.0,
                                                         -a * a * a * a * std::sin(z[kY]) + 2 * z[kY]};
                                          },
                                          [](const Point& z) {
                                            const double a = std::max(0.0, z[0]);
                                            return (12 * a * a - a * a * a * a) * std::cos(z[kY]) + 2.0;
                                          })});
  return out;
}

struct NamedProblem {
  std::string name;
  ProblemSpec spec;
};

/// Solver configurations (n = 1) used by the property and acceptance checks. The last two
/// use odd data with equal weights, which pins a free boundary point at the origin.
inline std::vector<NamedProblem> solve_corpus() {
  struct Row {
    const char* name;
    const char* g;
    double lp, lm, p;
  };
  const Row rows[] = {
      {"linear-shift", "harmonic:deg=1,shift=0.2", 1.0, 1.0, 2.0},
      {"trig-asym", "trig:freq=2,amp=1,phase=0.4", 1.0, 2.0, 2.0},
      {"quadratic-p3", "harmonic:deg=2,shift=-0.25", 2.0, 0.5, 3.0},
      {"cubic-odd", "harmonic:deg=3", 1.0, 1.0, 2.0},
      {"trig-odd-p3", "trig:freq=3,amp=1", 1.0, 1.0, 3.0},
  };
  std::vector<NamedProblem> out;
  for (const Row& r : rows) {
    ProblemSpec s;
    s.g = BoundaryDatum::parse(r.g);
    s.lambda_plus = r.lp;
    s.lambda_minus = r.lm;
    s.p = r.p;
    out.push_back({r.name, s});
  }
  return out;
}

}  // namespace bilap
