#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilap/diagnostics.hpp"
#include "bilap/errors.hpp"
#include "bilap/field.hpp"
#include "bilap/grid.hpp"
#include "bilap/harmonic_poly.hpp"
#include "bilap/quadrature.hpp"

namespace bilap {

enum class PointClass { Regular, Singular };

inline const char* to_string(PointClass c) { return c == PointClass::Regular ? "regular" : "singular"; }

struct FreeBoundaryPoint {
  Point location{};
  bool in_plus = false;   ///< on the boundary of {u > 0}
  bool in_minus = false;  ///< on the boundary of {u < 0}
  std::optional<PointClass> classification;
  double grad_u = 0.0;  ///< |grad_x u| on the thin space
  double grad_v = 0.0;  ///< |grad_x v| on the thin space
  double threshold = 0.0;
  std::string tag;  ///< structural conclusion attached to regular points
  std::optional<double> mu_hat;
  std::optional<int> mu_int;
  std::optional<HomogeneousHarmonicPoly> p_mu, q_mu;
  std::optional<double> fit_residual;
  std::optional<int> stratum_dim;

  std::string side() const { return in_plus && in_minus ? "both" : in_plus ? "plus" : "minus"; }
};

namespace detail {

inline int sign_of(double t, double tol) { return t > tol ? 1 : t < -tol ? -1 : 0; }

inline void label(FreeBoundaryPoint& p, int s) {
  if (s > 0) p.in_plus = true;
  if (s < 0) p.in_minus = true;
}

/// Free boundary points along one line of y = 0 nodes, ordered by position.
inline void scan_line(const HalfBallGrid& g, const ScalarField& u, const std::vector<std::size_t>& line, int axis,
                      double tol, std::vector<FreeBoundaryPoint>& out) {
  const std::size_t len = line.size();
  std::vector<int> s(len);
  for (std::size_t k = 0; k < len; ++k) s[k] = sign_of(u[line[k]], tol);
  auto inside = [&](const Point& z) { return norm(z) < 1.0 - 1e-12; };

  for (std::size_t k = 0; k + 1 < len; ++k) {
    if (s[k] * s[k + 1] < 0) {
      const double a = u[line[k]], b = u[line[k + 1]];
      const double t = a / (a - b);
      Point z = g.position(line[k]);
      z[axis_slot(g.dim(), axis)] += t * g.spacing();
      if (!inside(z)) continue;
      FreeBoundaryPoint p;
      p.location = z;
      p.in_plus = p.in_minus = true;
      out.push_back(p);
    }
  }
  // Zero runs: each end adjacent to a signed node is a boundary point of that sign's set.
  for (std::size_t k = 0; k < len;) {
    if (s[k] != 0) {
      ++k;
      continue;
    }
    std::size_t e = k;
    while (e + 1 < len && s[e + 1] == 0) ++e;
    const int left = k > 0 ? s[k - 1] : 0;
    const int right = e + 1 < len ? s[e + 1] : 0;
    if (k == e) {
      FreeBoundaryPoint p;
      p.location = g.position(line[k]);
      label(p, left);
      label(p, right);
      if ((p.in_plus || p.in_minus) && inside(p.location)) out.push_back(p);
    } else {
      if (left != 0 && inside(g.position(line[k]))) {
        FreeBoundaryPoint p;
        p.location = g.position(line[k]);
        label(p, left);
        out.push_back(p);
      }
      if (right != 0 && inside(g.position(line[e]))) {
        FreeBoundaryPoint p;
        p.location = g.position(line[e]);
        label(p, right);
        out.push_back(p);
      }
    }
    k = e + 1;
  }
}

}  // namespace detail

/// Boundary points of {u > 0} and {u < 0} on the thin space, from the nodal trace.
/// Sign changes between neighbouring nodes are located by linear interpolation; nodal
/// values within zero_tol of 0 count as zero.
inline std::vector<FreeBoundaryPoint> extract_gamma(const ScalarField& u, double zero_tol = 0.0) {
  const HalfBallGrid& g = *u.grid;
  const int n = g.dim();
  std::vector<FreeBoundaryPoint> out;
  // Lines of y = 0 nodes along each thin axis.
  for (int axis = 0; axis < n; ++axis) {
    std::map<std::vector<int>, std::vector<std::pair<int, std::size_t>>> lines;
    for (std::size_t id = 0; id < g.size(); ++id) {
      const auto l = g.lattice(id);
      if (l.k != 0) continue;
      const int along = axis == 0 ? l.i : l.j;
      const std::vector<int> key = axis == 0 ? std::vector<int>{l.j} : std::vector<int>{l.i};
      lines[key].push_back({along, id});
    }
    for (auto& [key, nodes] : lines) {
      std::sort(nodes.begin(), nodes.end());
      std::vector<std::size_t> ids;
      for (const auto& nd : nodes) ids.push_back(nd.second);
      detail::scan_line(g, u, ids, axis, zero_tol, out);
    }
  }
  std::sort(out.begin(), out.end(), [](const FreeBoundaryPoint& a, const FreeBoundaryPoint& b) {
    return a.location < b.location;
  });
  return out;
}

namespace detail {

/// Thin-space gradient of w at a point of y = 0, from central differences at the nodes of
/// the enclosing thin cell, interpolated linearly.
inline Point thin_gradient(const ScalarField& w, const Point& z) {
  const HalfBallGrid& g = *w.grid;
  const auto grad = nodal_gradient(w, ThinDerivative::Reflect);
  Point out{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim(); ++a) {
    const int slot = axis_slot(g.dim(), a);
    out[slot] = interp(grad[static_cast<std::size_t>(slot)], z);
  }
  return out;
}

}  // namespace detail

inline constexpr double kGradientThresholdFactor = 10.0;
inline const char* const kRegularTag = "C^{3,alpha} graph locally (structural result, not computed)";

/// Regular when both thin gradients exceed tau'(h) = factor * h, singular otherwise.
inline PointClass classify_point(FreeBoundaryPoint& p, const ScalarField& u, const ScalarField& v,
                                 double factor = kGradientThresholdFactor) {
  const double h = u.grid->spacing();
  p.threshold = factor * h;
  p.grad_u = norm(detail::thin_gradient(u, p.location));
  p.grad_v = norm(detail::thin_gradient(v, p.location));
  p.classification = (p.grad_u > p.threshold && p.grad_v > p.threshold) ? PointClass::Regular : PointClass::Singular;
  p.tag = *p.classification == PointClass::Regular ? kRegularTag : "";
  return *p.classification;
}

/// Same rule for closed-form fields, with an explicit threshold.
inline PointClass classify_point(FreeBoundaryPoint& p, const SampledField& u, const SampledField& v, int n,
                                 double threshold) {
  auto thin_norm = [n](const Point& g) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += g[axis_slot(n, a)] * g[axis_slot(n, a)];
    return std::sqrt(s);
  };
  p.threshold = threshold;
  p.grad_u = thin_norm(u.gradient(p.location));
  p.grad_v = thin_norm(v.gradient(p.location));
  p.classification = (p.grad_u > threshold && p.grad_v > threshold) ? PointClass::Regular : PointClass::Singular;
  p.tag = *p.classification == PointClass::Regular ? kRegularTag : "";
  return *p.classification;
}

struct RescaledPair {
  SampledField u, v;
  double normalization = 0.0;  ///< int_{(dB_1)^+} (u_r^2 + v_r^2) dS
};

/// z -> w(center + r z) / scale, defined on the unit half ball.
inline SampledField rescale(const SampledField& w, const Point& center, double r, double scale) {
  SampledField out;
  out.value = [w, center, r, scale](const Point& z) { return w(center + r * z) / scale; };
  out.gradient = [w, center, r, scale](const Point& z) { return (r / scale) * w.gradient(center + r * z); };
  if (w.laplacian) {
    out.laplacian = [w, center, r, scale](const Point& z) { return r * r / scale * w.laplacian(center + r * z); };
  }
  out.resolution = w.resolution / r;
  return out;
}

/// Almgren rescaling u(center + r z) / sqrt(phi(r)), normalized in the squared sense.
inline RescaledPair almgren_rescale(const FieldPair& fp, const Point& center, double r,
                                    int samples = kDefaultSamples) {
  detail::check_ball(fp, center, r);
  const SphereQuadrature q = make_quadrature(fp.n, center, r, samples);
  const double H = integrate(q.surface, [&](const Point& z) { return fp.u(z) * fp.u(z) + fp.v(z) * fp.v(z); });
  const double phi = H / std::pow(r, fp.n);
  if (!(phi > 0.0)) throw DiagnosticError("almgren_rescale: phi(r) vanishes (degenerate)");
  RescaledPair out;
  out.u = rescale(fp.u, center, r, std::sqrt(phi));
  out.v = rescale(fp.v, center, r, std::sqrt(phi));
  const SphereQuadrature unit = make_quadrature(fp.n, Point{0, 0, 0}, 1.0, samples);
  out.normalization = integrate(unit.surface, [&](const Point& z) { return out.u(z) * out.u(z) + out.v(z) * out.v(z); });
  return out;
}

/// Homogeneous rescaling w(center + r z) / r^mu.
inline SampledField homogeneous_rescale(const SampledField& w, const Point& center, double r, double mu,
                                        double h = 0.0) {
  if (h > 0.0 && r < 4.0 * h * (1.0 - 1e-12)) throw ConfigError("homogeneous_rescale: radius below 4h");
  return rescale(w, center, r, std::pow(r, mu));
}

struct PolyFit {
  HomogeneousHarmonicPoly poly;
  double residual = 0.0;  ///< weighted L2 misfit on (dB_1)^+
  double norm = 0.0;      ///< weighted L2 norm of the data
};

/// Weighted least squares of w on the unit half sphere against the degree-mu basis.
inline PolyFit fit_on_unit_sphere(const SampledField& w, int n, int mu, int samples = kDefaultSamples) {
  const SphereQuadrature unit = make_quadrature(n, Point{0, 0, 0}, 1.0, samples);
  const auto basis = harmonic_basis(n, mu);
  const auto rows = static_cast<Eigen::Index>(unit.surface.size());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& node = unit.surface[static_cast<std::size_t>(i)];
    const double sw = std::sqrt(node.w);
    for (Eigen::Index c = 0; c < cols; ++c) A(i, c) = sw * basis[static_cast<std::size_t>(c)](node.z);
    b[i] = sw * w(node.z);
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  PolyFit fit;
  fit.poly = HomogeneousHarmonicPoly(n, mu, std::vector<double>(x.data(), x.data() + x.size()));
  fit.residual = (A * x - b).norm();
  fit.norm = b.norm();
  return fit;
}

struct BlowupFit {
  HomogeneousHarmonicPoly p_mu, q_mu;  ///< fits at the smallest radius
  std::vector<double> radii;           ///< ascending
  std::vector<double> residual;        ///< relative misfit of (u, v) per radius
  std::vector<HomogeneousHarmonicPoly> p_curve, q_curve;
};

inline constexpr double kNoBlowupResidual = 0.5;

/// Homogeneous rescalings at each radius fitted against the degree-mu harmonic basis.
inline BlowupFit blowup_fit(const FieldPair& fp, const Point& center, std::vector<double> radii, int mu,
                            int samples = kDefaultSamples) {
  if (mu < 1) throw ConfigError("blowup_fit: mu must be a positive integer");
  if (radii.empty()) throw ConfigError("blowup_fit: no radii");
  std::sort(radii.begin(), radii.end());
  BlowupFit out;
  for (double r : radii) {
    detail::check_ball(fp, center, r);
    const PolyFit pu = fit_on_unit_sphere(homogeneous_rescale(fp.u, center, r, mu, fp.h), fp.n, mu, samples);
    const PolyFit pv = fit_on_unit_sphere(homogeneous_rescale(fp.v, center, r, mu, fp.h), fp.n, mu, samples);
    const double total = pu.norm * pu.norm + pv.norm * pv.norm;
    const double miss = pu.residual * pu.residual + pv.residual * pv.residual;
    out.radii.push_back(r);
    out.residual.push_back(total > 0.0 ? std::sqrt(miss / total) : 1.0);
    out.p_curve.push_back(pu.poly);
    out.q_curve.push_back(pv.poly);
  }
  if (*std::min_element(out.residual.begin(), out.residual.end()) > kNoBlowupResidual) {
    throw DiagnosticError("blowup_fit: residual above 0.5 at every radius, no degree-" + std::to_string(mu) +
                          " blow-up");
  }
  out.p_mu = out.p_curve.front();
  out.q_mu = out.q_curve.front();
  return out;
}

/// Degree in [0, max_degree] with the smallest relative fit residual of (u, v) at radius r.
/// The relative residual does not depend on the r^mu scaling, so degrees compare directly.
inline int best_fit_degree(const FieldPair& fp, const Point& center, double r, int max_degree = 4,
                           int samples = kDefaultSamples) {
  detail::check_ball(fp, center, r);
  int best = 0;
  double best_res = 1e300;
  for (int k = 0; k <= max_degree; ++k) {
    const PolyFit pu = fit_on_unit_sphere(rescale(fp.u, center, r, 1.0), fp.n, k, samples);
    const PolyFit pv = fit_on_unit_sphere(rescale(fp.v, center, r, 1.0), fp.n, k, samples);
    const double total = pu.norm * pu.norm + pv.norm * pv.norm;
    const double res = total > 0.0 ? std::sqrt((pu.residual * pu.residual + pv.residual * pv.residual) / total) : 1.0;
    if (res < best_res - 1e-12) {
      best_res = res;
      best = k;
    }
  }
  return best;
}

struct Nondegeneracy {
  double c_min = 0.0;
  double c_max = 0.0;
  std::vector<double> ratios;  ///< max(sup|u|, sup|v|) / r^mu per radius
  bool degenerate = false;     ///< c_min = 0, or c_min below half of c_max
};

inline Nondegeneracy nondegeneracy_check(const FieldPair& fp, const Point& center, const std::vector<double>& radii,
                                         double mu, int samples = 512) {
  Nondegeneracy out;
  out.c_min = 1e300;
  for (double r : radii) {
    detail::check_ball(fp, center, r);
    const double s = std::max(sphere_sup(fp.u, fp.n, center, r, samples), sphere_sup(fp.v, fp.n, center, r, samples));
    const double ratio = s / std::pow(r, mu);
    out.ratios.push_back(ratio);
    out.c_min = std::min(out.c_min, ratio);
    out.c_max = std::max(out.c_max, ratio);
  }
  if (radii.empty()) out.c_min = 0.0;
  out.degenerate = !(out.c_min > 0.0) || out.c_min < 0.5 * out.c_max;
  return out;
}

/// Rank of a small dense matrix by full-pivot LU.
inline int matrix_rank(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  double scale = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      scale = std::max(scale, std::abs(rows[i][j]));
    }
  }
  if (scale == 0.0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m / scale);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

/// Dimension of the thin directions annihilating the trace gradient of a polynomial.
inline int annihilator_dimension(const HomogeneousHarmonicPoly& p) {
  return p.dim() - matrix_rank(p.thin_gradient_coefficients());
}

/// max of the annihilator dimensions of p and q, capped at n - 1.
inline int singular_dimension(const HomogeneousHarmonicPoly& p, const HomogeneousHarmonicPoly& q) {
  if (p.is_zero() || q.is_zero()) throw DiagnosticError("singular_dimension: zero blow-up polynomial");
  if (p.degree() != q.degree() || p.dim() != q.dim()) throw ConfigError("singular_dimension: polynomials must share degree and dimension");
  return std::min(std::max(annihilator_dimension(p), annihilator_dimension(q)), p.dim() - 1);
}

/// L2 norm on (dB_1)^+ of a - b.
inline double surface_distance(const HomogeneousHarmonicPoly& a, const HomogeneousHarmonicPoly& b,
                               int samples = kDefaultSamples) {
  const SphereQuadrature unit = make_quadrature(a.dim(), Point{0, 0, 0}, 1.0, samples);
  return std::sqrt(integrate(unit.surface, [&](const Point& z) {
    const double d = a(z) - b(z);
    return d * d;
  }));
}

/// max over neighbouring points (ordered by location) of |p1 - p0| + |q1 - q0| on (dB_1)^+.
inline double continuity_probe(std::vector<FreeBoundaryPoint> pts, int samples = kDefaultSamples) {
  std::vector<FreeBoundaryPoint> fitted;
  for (auto& p : pts) {
    if (p.p_mu && p.q_mu) fitted.push_back(std::move(p));
  }
  if (fitted.size() < 2) throw ConfigError("continuity_probe: need at least two fitted points");
  std::sort(fitted.begin(), fitted.end(), [](const auto& a, const auto& b) { return a.location < b.location; });
  double worst = 0.0;
  for (std::size_t k = 1; k < fitted.size(); ++k) {
    if (fitted[k].p_mu->degree() != fitted[k - 1].p_mu->degree()) throw ConfigError("continuity_probe: points have different mu");
    worst = std::max(worst, surface_distance(*fitted[k].p_mu, *fitted[k - 1].p_mu, samples) +
                                surface_distance(*fitted[k].q_mu, *fitted[k - 1].q_mu, samples));
  }
  return worst;
}

}  // namespace bilap
