#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "bilap/errors.hpp"
#include "bilap/field.hpp"
#include "bilap/grid.hpp"
#include "bilap/problem.hpp"

namespace bilap {

/// Visits the (2n+3)-point Laplacian stencil of a free node as fn(neighbor_id, coefficient).
/// At thin nodes the missing y < 0 neighbor is its even reflection, so that neighbor is
/// visited twice. Every neighbor of a free node exists by construction of the grid.
template <class Fn>
void for_each_stencil(const HalfBallGrid& g, std::size_t id, Fn&& fn) {
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  fn(id, -2.0 * g.ambient_dim() * ih2);
  for (int a = 0; a < g.ambient_dim(); ++a) {
    fn(g.neighbor(id, a, +1), ih2);
    fn(g.neighbor(id, a, -1), ih2);
  }
}

/// Delta_h w at free nodes; Dirichlet nodes carry 0 (they are not part of the energy).
inline ScalarField discrete_laplacian(const ScalarField& w) {
  const HalfBallGrid& g = *w.grid;
  ScalarField out(w.grid, FieldRole::Laplacian);
  for (std::size_t id : g.free_nodes()) {
    double acc = 0.0;
    for_each_stencil(g, id, [&](std::size_t j, double c) { acc += c * w[j]; });
    out[id] = acc;
  }
  return out;
}

/// L^T x, where L maps node values to the Laplacian at free nodes (x read at free nodes).
inline ScalarField laplacian_transpose(const ScalarField& x) {
  const HalfBallGrid& g = *x.grid;
  ScalarField out(x.grid);
  for (std::size_t id : g.free_nodes()) {
    const double xi = x[id];
    for_each_stencil(g, id, [&](std::size_t j, double c) { out[j] += c * xi; });
  }
  return out;
}

/// Field equal to g at Dirichlet (outer and corner) nodes and 0 at free nodes.
inline ScalarField dirichlet_lift(const GridPtr& grid, const ProblemSpec& spec) {
  ScalarField out(grid, FieldRole::Solution);
  for (std::size_t id : grid->dirichlet_nodes()) out[id] = spec.g(grid->position(id));
  return out;
}

/// Discrete J: sum over free nodes of V_i (Delta_h w)_i^2 plus the thin penalty sum
/// with line weight h^n.
inline double energy(const ScalarField& w, const ProblemSpec& spec) {
  const HalfBallGrid& g = *w.grid;
  const ScalarField lap = discrete_laplacian(w);
  double bulk = 0.0;
  for (std::size_t id : g.free_nodes()) bulk += g.cell_volume(id) * lap[id] * lap[id];
  double thin = 0.0;
  for (std::size_t id : g.thin_nodes()) thin += thin_penalty(w[id], spec);
  return bulk + g.thin_weight() * thin;
}

/// Exact gradient of the discrete energy with respect to free node values.
inline ScalarField energy_gradient(const ScalarField& w, const ProblemSpec& spec) {
  const HalfBallGrid& g = *w.grid;
  ScalarField weighted = discrete_laplacian(w);
  for (std::size_t id : g.free_nodes()) weighted[id] *= g.cell_volume(id);
  ScalarField grad = laplacian_transpose(weighted);
  for (double& x : grad.values) x *= 2.0;
  const double tw = g.thin_weight();
  for (std::size_t id : g.thin_nodes()) grad[id] -= 2.0 * tw * thin_reaction(w[id], spec);
  for (std::size_t id : g.dirichlet_nodes()) grad[id] = 0.0;
  grad.role = FieldRole::Residual;
  return grad;
}

/// Generalized Hessian of the discrete energy at w applied to a direction (Dirichlet
/// entries of the direction are treated as 0).
inline ScalarField energy_hessian_apply(const ScalarField& w, const ScalarField& direction,
                                        const ProblemSpec& spec) {
  const HalfBallGrid& g = *w.grid;
  ScalarField d = direction;
  for (std::size_t id : g.dirichlet_nodes()) d[id] = 0.0;
  ScalarField weighted = discrete_laplacian(d);
  for (std::size_t id : g.free_nodes()) weighted[id] *= g.cell_volume(id);
  ScalarField out = laplacian_transpose(weighted);
  for (double& x : out.values) x *= 2.0;
  const double tw = g.thin_weight();
  for (std::size_t id : g.thin_nodes()) out[id] -= 2.0 * tw * thin_reaction_slope(w[id], spec) * d[id];
  for (std::size_t id : g.dirichlet_nodes()) out[id] = 0.0;
  return out;
}

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Free-by-free block of L, indexed by HalfBallGrid::free_index.
inline SparseMatrix laplacian_matrix(const HalfBallGrid& g) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.free_nodes().size() * (2 * g.ambient_dim() + 1));
  for (std::size_t id : g.free_nodes()) {
    const auto row = static_cast<int>(g.free_index(id));
    for_each_stencil(g, id, [&](std::size_t j, double c) {
      const std::size_t col = g.free_index(j);
      if (col != HalfBallGrid::npos) trip.emplace_back(row, static_cast<int>(col), c);
    });
  }
  const auto nf = static_cast<int>(g.free_nodes().size());
  SparseMatrix L(nf, nf);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

/// The Hessian 2 L^T V L - 2 h^n diag(G(w)) on free nodes as a sparse matrix.
inline SparseMatrix assemble_hessian(const ScalarField& w, const ProblemSpec& spec) {
  const HalfBallGrid& g = *w.grid;
  const SparseMatrix L = laplacian_matrix(g);
  Eigen::VectorXd vol(L.rows());
  for (std::size_t id : g.free_nodes()) vol[static_cast<int>(g.free_index(id))] = g.cell_volume(id);
  SparseMatrix H = SparseMatrix(L.transpose()) * vol.asDiagonal() * L;
  H *= 2.0;
  const double tw = g.thin_weight();
  for (std::size_t id : g.thin_nodes()) {
    const auto k = static_cast<int>(g.free_index(id));
    H.coeffRef(k, k) -= 2.0 * tw * thin_reaction_slope(w[id], spec);
  }
  H.makeCompressed();
  return H;
}

/// Discrete harmonic extension of g: Delta_h w = 0 at free nodes, w = g at Dirichlet nodes.
/// Solved through the symmetric form -V L (V L is symmetric thanks to the halved thin volume).
inline ScalarField harmonic_extension(const GridPtr& grid, const ProblemSpec& spec) {
  const HalfBallGrid& g = *grid;
  ScalarField w = dirichlet_lift(grid, spec);
  if (g.free_nodes().empty()) return w;
  const SparseMatrix L = laplacian_matrix(g);
  Eigen::VectorXd vol(L.rows());
  for (std::size_t id : g.free_nodes()) vol[static_cast<int>(g.free_index(id))] = g.cell_volume(id);
  SparseMatrix A = -(vol.asDiagonal() * L);
  const ScalarField lift_lap = discrete_laplacian(w);
  Eigen::VectorXd rhs(L.rows());
  for (std::size_t id : g.free_nodes()) {
    const auto k = static_cast<int>(g.free_index(id));
    rhs[k] = vol[k] * lift_lap[id];
  }
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success) throw SolverError("harmonic extension: factorization failed", w.values, 0.0);
  const Eigen::VectorXd x = solver.solve(rhs);
  for (std::size_t id : g.free_nodes()) w[id] = x[static_cast<int>(g.free_index(id))];
  return w;
}

}  // namespace bilap
