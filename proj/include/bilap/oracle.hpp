#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bilap/discrete_ops.hpp"
#include "bilap/errors.hpp"
#include "bilap/solver.hpp"

namespace bilap::oracle {

/// Largest eigenvalue of the energy Hessian at w, by power iteration.
inline double hessian_norm_estimate(const ScalarField& w, const ProblemSpec& spec, int iters = 60) {
  const HalfBallGrid& g = *w.grid;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField d(w.grid);
  for (std::size_t id : g.free_nodes()) d[id] = uni(rng);
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    const double dn = std::sqrt(std::inner_product(d.values.begin(), d.values.end(), d.values.begin(), 0.0));
    if (dn == 0.0) return 0.0;
    for (double& x : d.values) x /= dn;
    ScalarField hd = energy_hessian_apply(w, d, spec);
    lam = std::inner_product(d.values.begin(), d.values.end(), hd.values.begin(), 0.0);
    d = std::move(hd);
  }
  return lam;
}

/// First-order reference minimizer: gradient steps of fixed length 0.9/L on the free nodes
/// (the Dirichlet nodes are held at g), with Nesterov momentum and gradient-based restart.
/// No Newton step and no line search. L is re-estimated every 1000 steps.
inline SolveResult brute_minimize(const ProblemSpec& spec, double tol = 1e-10, long budget = 1'000'000) {
  spec.validate();
  if (spec.h < 1.0 / 16.0 - 1e-12) throw ConfigError("oracle: h must be >= 1/16");
  const GridPtr grid = build_grid(spec.n, spec.h);
  const HalfBallGrid& g = *grid;
  if (g.size() > 2000) throw ConfigError("oracle: node count exceeds 2000");

  SolveResult res;
  ScalarField x = harmonic_extension(grid, spec);
  res.initial_energy = energy(x, spec);
  res.energy_history.push_back(res.initial_energy);
  ScalarField y = x;
  double t = 1.0;
  double step = 0.0;
  double gnorm = 0.0;
  long k = 0;
  for (; k < budget; ++k) {
    if (k % 1000 == 0) step = 0.9 / std::max(hessian_norm_estimate(y, spec), 1e-300);
    const ScalarField gy = energy_gradient(y, spec);
    ScalarField xn = y;
    for (std::size_t id : g.free_nodes()) xn[id] -= step * gy[id];

    double restart_test = 0.0;
    for (std::size_t id : g.free_nodes()) restart_test += gy[id] * (xn[id] - x[id]);
    if (restart_test > 0.0) t = 1.0;
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    for (std::size_t id : g.free_nodes()) y[id] = xn[id] + beta * (xn[id] - x[id]);
    x = std::move(xn);
    t = tn;

    if (k % 25 == 0) {
      gnorm = energy_gradient(x, spec).sup_norm();
      if (gnorm <= tol) break;
    }
  }
  if (gnorm > tol) {
    throw SolverError("oracle: iteration budget exhausted, gradient sup-norm " + std::to_string(gnorm), x.values, gnorm);
  }
  res.u = x;
  res.u.role = FieldRole::Solution;
  res.v = discrete_laplacian(res.u);
  res.energy = energy(res.u, spec);
  res.gradient_norm = gnorm;
  res.iterations = static_cast<int>(k);
  res.converged = true;
  res.energy_history.push_back(res.energy);
  return res;
}

namespace detail {

inline double adaptive_gk(const std::function<double(double)>& f, double a, double b, double tol, int depth, bool& ok) {
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || err <= 1e-14 * std::abs(val)) return val;
  if (depth == 0) {
    ok = false;
    return val;
  }
  const double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, 0.5 * tol, depth - 1, ok) + adaptive_gk(f, m, b, 0.5 * tol, depth - 1, ok);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b] to absolute tolerance tol.
inline double reference_integral(const std::function<double(double)>& f, double a, double b, double tol = 1e-10) {
  bool ok = true;
  const double val = detail::adaptive_gk(f, a, b, tol, 20, ok);
  if (!ok) throw DiagnosticError("reference_integral: refinement did not converge");
  return val;
}

/// int_0^pi f(r, theta) r d theta   (half circle of radius r, n = 1)
inline double reference_surface(const std::function<double(double, double)>& f, double r) {
  return reference_integral([&](double th) { return f(r, th) * r; }, 0.0, std::numbers::pi);
}

/// int_0^r int_0^pi f(rho, theta) rho d theta d rho   (half disk, n = 1)
inline double reference_solid(const std::function<double(double, double)>& f, double r) {
  return reference_integral(
      [&](double rho) { return reference_integral([&](double th) { return f(rho, th) * rho; }, 0.0, std::numbers::pi, 1e-12); },
      0.0, r);
}

/// int_{-r}^{r} f(x) dx   (thin segment, n = 1)
inline double reference_thin(const std::function<double(double)>& f, double r) {
  return reference_integral(f, -r, r);
}

}  // namespace bilap::oracle
