#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bilap/discrete_ops.hpp"
#include "bilap/errors.hpp"
#include "bilap/field.hpp"
#include "bilap/grid.hpp"
#include "bilap/problem.hpp"
#include "bilap/quadrature.hpp"

namespace bilap {

/// Discrete minimizer of J together with v = Delta_h u.
struct SolveResult {
  ScalarField u;
  ScalarField v;
  double energy = 0.0;
  double initial_energy = 0.0;
  double gradient_norm = 0.0;  ///< sup-norm of the energy gradient at u
  int iterations = 0;
  int linear_iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  std::vector<double> energy_history;  ///< J at every accepted iterate, starting with the initial one

  const HalfBallGrid& grid() const { return *u.grid; }
};

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for SPD A; stops at ||r|| <= tol ||b||.
inline PcgResult pcg(const SparseMatrix& A, const Eigen::VectorXd& b,
                     const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& precondition,
                     double tol, int max_iter) {
  PcgResult out;
  out.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precondition(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double alpha = rz / p.dot(Ap);
    out.x += alpha * p;
    r -= alpha * Ap;
    out.iterations = it;
    if (r.norm() <= tol * bnorm) {
      out.converged = true;
      return out;
    }
    z = precondition(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return out;
}

namespace detail {

inline Eigen::VectorXd gather_free(const ScalarField& f) {
  const HalfBallGrid& g = *f.grid;
  Eigen::VectorXd out(static_cast<Eigen::Index>(g.free_nodes().size()));
  for (std::size_t k = 0; k < g.free_nodes().size(); ++k) out[static_cast<Eigen::Index>(k)] = f[g.free_nodes()[k]];
  return out;
}

inline void scatter_add_free(ScalarField& f, const Eigen::VectorXd& x, double scale) {
  const HalfBallGrid& g = *f.grid;
  for (std::size_t k = 0; k < g.free_nodes().size(); ++k) f[g.free_nodes()[k]] += scale * x[static_cast<Eigen::Index>(k)];
}

}  // namespace detail

/// Size of the rounding noise in energy_gradient at w; requested tolerances below it are unattainable.
inline double gradient_roundoff_floor(const ScalarField& w) {
  const HalfBallGrid& g = *w.grid;
  const double stencil = 2.0 * (g.dim() + 1);
  return 8.0 * std::numeric_limits<double>::epsilon() * stencil * stencil * std::pow(g.spacing(), g.dim() - 3) *
         std::max(1.0, w.sup_norm());
}

/// Damped semismooth Newton on the discrete energy, Armijo backtracking, PCG inner solves.
/// The default initial iterate is the discrete harmonic extension of g.
inline SolveResult minimize(const ProblemSpec& spec, const std::optional<ScalarField>& initial = std::nullopt) {
  spec.validate();
  if (!spec.diagnostics_admissible()) {
    throw ConfigError("p: Newton solver requires p = 2 or p >= 3");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const GridPtr grid = initial ? initial->grid : build_grid(spec.n, spec.h);
  const HalfBallGrid& g = *grid;

  SolveResult res;
  if (initial) {
    res.u = *initial;
    const ScalarField lift = dirichlet_lift(grid, spec);
    for (std::size_t id : g.dirichlet_nodes()) res.u[id] = lift[id];
  } else {
    res.u = harmonic_extension(grid, spec);
  }
  res.u.role = FieldRole::Solution;

  double J = energy(res.u, spec);
  res.initial_energy = J;
  res.energy_history.push_back(J);

  Eigen::SimplicialLLT<SparseMatrix> factor;
  bool have_factor = false;
  int last_cg = 0;
  const auto nfree = static_cast<int>(g.free_nodes().size());

  for (int it = 0;; ++it) {
    const ScalarField grad = energy_gradient(res.u, spec);
    res.gradient_norm = grad.sup_norm();
    if (res.gradient_norm <= std::max(spec.tol_grad_rel * (1.0 + std::abs(J)), gradient_roundoff_floor(res.u))) {
      res.converged = true;
      break;
    }
    if (it >= spec.max_iter) break;

    const SparseMatrix H = assemble_hessian(res.u, spec);
    const Eigen::VectorXd b = -detail::gather_free(grad);
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> prec;
    Eigen::VectorXd inv_diag;
    if (spec.preconditioner == Preconditioner::Cholesky) {
      // The Hessian changes only on the thin diagonal between steps; refactor when the
      // stale factor stops being a good preconditioner.
      if (!have_factor || last_cg > 20) {
        factor.compute(H);
        if (factor.info() != Eigen::Success) throw SolverError("minimize: Hessian factorization failed", res.u.values, res.gradient_norm);
        have_factor = true;
      }
      prec = [&factor](const Eigen::VectorXd& r) -> Eigen::VectorXd { return factor.solve(r); };
    } else {
      inv_diag = H.diagonal().cwiseInverse();
      prec = [&inv_diag](const Eigen::VectorXd& r) -> Eigen::VectorXd { return inv_diag.cwiseProduct(r); };
    }
    const PcgResult cg = pcg(H, b, prec, spec.cg_tol, 10 * std::max(nfree, 1));
    last_cg = cg.iterations;
    res.linear_iterations += cg.iterations;
    if (!cg.converged) {
      throw SolverError("minimize: conjugate gradients did not converge", res.u.values, res.gradient_norm);
    }

    const double slope = -b.dot(cg.x);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 50; ++halving) {
      ScalarField trial = res.u;
      detail::scatter_add_free(trial, cg.x, t);
      const double Jt = energy(trial, spec);
      // Floating-point floor: differences below a few ulps of J are not informative.
      if (Jt <= J + 1e-4 * t * slope + 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(J))) {
        res.u = std::move(trial);
        J = std::min(Jt, J);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw SolverError("minimize: line search failed after 50 halvings", res.u.values, res.gradient_norm);
    }
    res.energy_history.push_back(J);
    res.iterations = it + 1;
  }

  res.energy = energy(res.u, spec);
  res.v = discrete_laplacian(res.u);
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

/// Random admissible test function: a product of compactly supported bumps
/// exp(-1 / (1 - t^2)), one per coordinate, centered on the thin space. The support box
/// stays inside B_1, and the factor in y is even, so phi_y = 0 on the thin space.
struct BumpTest {
  Point c;
  double s;
  int n = 1;

  static double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }
  static double bump_dd(double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    const double q = 1.0 - t * t;
    return bump(t) * (4.0 * t * t / (q * q * q * q) - (2.0 + 6.0 * t * t) / (q * q * q));
  }

  double value(const Point& z) const {
    double acc = 1.0;
    for (int a = 0; a <= n; ++a) acc *= bump((z[axis_slot(n, a)] - c[axis_slot(n, a)]) / s);
    return acc;
  }

  double laplacian(const Point& z) const {
    double t[3], b[3];
    for (int a = 0; a <= n; ++a) {
      t[a] = (z[axis_slot(n, a)] - c[axis_slot(n, a)]) / s;
      b[a] = bump(t[a]);
    }
    double acc = 0.0;
    for (int a = 0; a <= n; ++a) {
      double term = bump_dd(t[a]) / (s * s);
      for (int o = 0; o <= n; ++o) {
        if (o != a) term *= b[o];
      }
      acc += term;
    }
    return acc;
  }
};

/// Max over random test functions of |int v Delta phi - int_thin F(u) phi| / ||Delta phi||,
/// with node quadrature on the grid and exact derivatives of phi.
inline double weak_residual(const SolveResult& result, const ProblemSpec& spec, int trials, unsigned seed = 12345) {
  if (trials < 10) throw ConfigError("weak_residual: need at least 10 trials");
  const HalfBallGrid& g = result.grid();
  const bool planar = g.dim() == 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cen(planar ? -0.3 : -0.4, planar ? 0.3 : 0.4);
  std::uniform_real_distribution<double> wid(0.3, planar ? 0.3 : 0.45);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    BumpTest phi{{cen(rng), planar ? cen(rng) : 0.0, 0.0}, wid(rng), g.dim()};
    double lhs = 0.0, norm2 = 0.0;
    for (std::size_t id : g.free_nodes()) {
      const double lp = phi.laplacian(g.position(id));
      lhs += g.cell_volume(id) * result.v[id] * lp;
      norm2 += g.cell_volume(id) * lp * lp;
    }
    double rhs = 0.0;
    for (std::size_t id : g.thin_nodes()) rhs += thin_reaction(result.u[id], spec) * phi.value(g.position(id));
    rhs *= g.thin_weight();
    worst = std::max(worst, std::abs(lhs - rhs) / std::sqrt(norm2));
  }
  return worst;
}

/// Strong-form residuals of the Euler-Lagrange system, measured with stencils other than
/// the one the solver uses.
struct ElCrosscheck {
  double harmonic_residual = 0.0;   ///< sup |Delta_h v| at interior nodes at least 2h from every boundary
  double flux_residual = 0.0;       ///< sup over thin nodes of |d_y v (one-sided, 2nd order) - F(u)|
  double flux_residual_core = 0.0;  ///< same, restricted to |x| <= 1/2, away from the corner layer at the sphere
  double boundary_v = 0.0;         ///< sup |v| at free nodes adjacent to the Dirichlet band
};

inline ElCrosscheck el_crosscheck(const SolveResult& result, const ProblemSpec& spec) {
  const HalfBallGrid& g = result.grid();
  const ScalarField& v = result.v;
  const double h = g.spacing();
  const int n = g.dim();
  auto shifted = [&](std::size_t id, int a, int steps) {
    std::size_t cur = id;
    const int dir = steps > 0 ? 1 : -1;
    for (int s = 0; s < std::abs(steps) && cur != HalfBallGrid::npos; ++s) cur = g.neighbor(cur, a, dir);
    return cur;
  };
  ElCrosscheck out;
  for (std::size_t id : g.free_nodes()) {
    if (g.node_class(id) != NodeClass::Interior) continue;
    if (g.lattice(id).k < 2) continue;
    double acc = -2.0 * (n + 1) * v[id];
    bool ok = true;
    for (int a = 0; a <= n && ok; ++a) {
      for (int dir : {-1, 1}) {
        const std::size_t far = shifted(id, a, 2 * dir);
        if (far == HalfBallGrid::npos || g.node_class(far) != NodeClass::Interior) {
          ok = false;
          break;
        }
        acc += v[g.neighbor(id, a, dir)];
      }
    }
    if (ok) out.harmonic_residual = std::max(out.harmonic_residual, std::abs(acc / (h * h)));
  }
  for (std::size_t id : g.thin_nodes()) {
    const std::size_t up1 = g.neighbor(id, n, +1);
    const std::size_t up2 = shifted(id, n, 2);
    if (up2 == HalfBallGrid::npos || !g.is_free(up1) || !g.is_free(up2)) continue;
    const double dy = (-3.0 * v[id] + 4.0 * v[up1] - v[up2]) / (2.0 * h);
    const double r = std::abs(dy - thin_reaction(result.u[id], spec));
    out.flux_residual = std::max(out.flux_residual, r);
    const Point z = g.position(id);
    if (dot(z, z) <= 0.25) out.flux_residual_core = std::max(out.flux_residual_core, r);
  }
  for (std::size_t id : g.free_nodes()) {
    bool near_band = false;
    for (int a = 0; a <= n; ++a) {
      for (int dir : {-1, 1}) {
        const std::size_t nb = g.neighbor(id, a, dir);
        if (nb != HalfBallGrid::npos && !g.is_free(nb) && g.node_class(nb) == NodeClass::Outer) near_band = true;
      }
    }
    if (near_band) out.boundary_v = std::max(out.boundary_v, std::abs(v[id]));
  }
  return out;
}

/// Discrete sub-mean-value check for the even extensions of u^+, u^-, v^+, v^-.
struct SubharmonicityReport {
  double max_excess = -1e300;  ///< max of w(z) - avg_{dB_rho(z)} w - slack; <= 0 means the check holds
  std::size_t checked = 0;
  std::size_t violations = 0;
  Point worst_point{};
  std::string worst_field;
};

inline SubharmonicityReport subharmonicity_check(const SolveResult& result, std::vector<int> radius_multiples = {4, 8},
                                                 int samples = 96) {
  const HalfBallGrid& g = result.grid();
  const double h = g.spacing();
  const int n = g.dim();
  const double slack = 1e-6 + 10.0 * h * h;
  const double margin = h * std::sqrt(n + 1.0);
  SubharmonicityReport rep;
  struct Part {
    const ScalarField* f;
    double sign;
    const char* name;
  };
  const Part parts[] = {{&result.u, 1.0, "u+"}, {&result.u, -1.0, "u-"}, {&result.v, 1.0, "v+"}, {&result.v, -1.0, "v-"}};
  for (std::size_t id : g.free_nodes()) {
    const Point z = g.position(id);
    for (int mult : radius_multiples) {
      const double rho = mult * h;
      if (norm(z) + rho + margin > 1.0) continue;
      for (const Part& part : parts) {
        const double center = std::max(0.0, part.sign * (*part.f)[id]);
        const double avg = sphere_average(n, z, rho, samples, [&](const Point& q) {
          return std::max(0.0, part.sign * interp(*part.f, q));
        });
        const double excess = center - avg - slack;
        ++rep.checked;
        if (excess > 0.0) ++rep.violations;
        if (excess > rep.max_excess) {
          rep.max_excess = excess;
          rep.worst_point = z;
          rep.worst_field = part.name;
        }
      }
    }
  }
  return rep;
}

}  // namespace bilap
