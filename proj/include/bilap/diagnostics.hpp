#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"
#include "bilap/harmonic_poly.hpp"
#include "bilap/problem.hpp"
#include "bilap/quadrature.hpp"
#include "bilap/sampled_field.hpp"
#include "bilap/solver.hpp"

namespace bilap {

/// The pair (u, v) as seen by the radial diagnostics, together with the thin reaction
/// used by the perturbed frequency.
struct FieldPair {
  SampledField u;
  SampledField v;
  int n = 1;
  double h = 0.0;  ///< grid spacing; 0 for closed-form fields (no resolution bound on radii)
  std::function<double(double)> reaction = [](double) { return 0.0; };
};

inline FieldPair solution_pair(const SolveResult& result, const ProblemSpec& spec) {
  FieldPair fp;
  fp.u = sample_grid(result.u, ThinDerivative::Reflect);
  fp.v = sample_grid(result.v, ThinDerivative::OneSided);
  fp.n = result.grid().dim();
  fp.h = result.grid().spacing();
  fp.reaction = [spec](double t) { return thin_reaction(t, spec); };
  return fp;
}

inline constexpr int kDefaultSamples = 256;

namespace detail {

inline void check_ball(const FieldPair& fp, const Point& center, double r) {
  if (center[kY] != 0.0) throw ConfigError("diagnostics: center must lie on the thin space y = 0");
  if (!(r > 0.0)) throw ConfigError("diagnostics: radius must be positive");
  if (fp.h > 0.0 && r < 4.0 * fp.h * (1.0 - 1e-12)) {
    throw ConfigError("diagnostics: radius " + std::to_string(r) + " below 4h");
  }
  if (norm(center) + r > 1.0 + 1e-12) throw DomainError("diagnostics: ball B_r(center) not contained in B_1");
}

inline double grad_sq(const SampledField& w, const Point& z) {
  const Point g = w.gradient(z);
  return dot(g, g);
}

}  // namespace detail

/// Geometric radii r_k = r_max 2^{-k/4} from r_max = min(0.9 dist, dist - h sqrt(n+1)) down
/// to r_min (default 4h, or r_max / 64 for closed-form fields).
inline std::vector<double> default_radii(const FieldPair& fp, const Point& center, double r_min = 0.0) {
  const double dist = 1.0 - norm(center);
  double r_max = 0.9 * dist;
  if (fp.h > 0.0) r_max = std::min(r_max, dist - fp.h * std::sqrt(fp.n + 1.0));
  if (r_min <= 0.0) r_min = fp.h > 0.0 ? 4.0 * fp.h : r_max / 64.0;
  std::vector<double> radii;
  for (int k = 0;; ++k) {
    const double r = r_max * std::pow(2.0, -k / 4.0);
    if (r < r_min * (1.0 - 1e-12)) break;
    radii.push_back(r);
  }
  std::sort(radii.begin(), radii.end());
  return radii;
}

struct ProfileRow {
  double r = 0.0;
  double H = 0.0, D = 0.0, D0 = 0.0, B = 0.0;
  double N = 0.0, N0 = 0.0, phi = 0.0;
  std::optional<double> W, M;
  bool degenerate = false;
};

/// Radial functionals of (u, v) around a thin-space center, radii ascending.
struct RadialProfile {
  Point center{};
  int n = 1;
  std::optional<double> mu;
  std::vector<ProfileRow> rows;

  std::vector<double> column(double ProfileRow::*field) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.*field);
    return out;
  }
};

struct ProfileOptions {
  int samples = kDefaultSamples;
  std::optional<double> mu;
  const HomogeneousHarmonicPoly* p_mu = nullptr;
  const HomogeneousHarmonicPoly* q_mu = nullptr;
};

inline RadialProfile compute_profile(const FieldPair& fp, const Point& center, std::vector<double> radii,
                                     const ProfileOptions& opt = {}) {
  if (radii.empty()) throw ConfigError("compute_profile: no radii");
  std::sort(radii.begin(), radii.end());
  for (double r : radii) detail::check_ball(fp, center, r);
  if ((opt.p_mu == nullptr) != (opt.q_mu == nullptr)) throw ConfigError("compute_profile: supply both blow-up polynomials or neither");
  if (opt.p_mu != nullptr && !opt.mu) throw ConfigError("compute_profile: blow-up polynomials need mu");

  RadialProfile prof;
  prof.center = center;
  prof.n = fp.n;
  prof.mu = opt.mu;
  for (double r : radii) {
    const SphereQuadrature q = make_quadrature(fp.n, center, r, opt.samples);
    ProfileRow row;
    row.r = r;
    row.H = integrate(q.surface, [&](const Point& z) {
      const double a = fp.u(z), b = fp.v(z);
      return a * a + b * b;
    });
    row.B = integrate(q.surface, [&](const Point& z) { return detail::grad_sq(fp.u, z) + detail::grad_sq(fp.v, z); });
    row.D0 = integrate(q.solid, [&](const Point& z) { return detail::grad_sq(fp.u, z) + detail::grad_sq(fp.v, z); });
    const double uv = integrate(q.solid, [&](const Point& z) { return fp.u(z) * fp.v(z); });
    const double thin = integrate(q.thin, [&](const Point& z) { return fp.reaction(fp.u(z)) * fp.v(z); });
    row.D = row.D0 + uv + thin;
    row.phi = row.H / std::pow(r, fp.n);
    if (opt.p_mu != nullptr) {
      const double mass = integrate(q.surface, [&](const Point& z) {
        const Point local = z - center;
        const double a = fp.u(z) - (*opt.p_mu)(local), b = fp.v(z) - (*opt.q_mu)(local);
        return a * a + b * b;
      });
      row.M = mass / std::pow(r, fp.n + 2.0 * *opt.mu);
    }
    prof.rows.push_back(row);
  }

  double scale = 0.0;
  for (const auto& row : prof.rows) scale = std::max(scale, row.H);
  for (auto& row : prof.rows) {
    row.degenerate = !(row.H > 1e-14 * scale);
    if (row.degenerate) {
      row.N = row.N0 = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    row.N = row.r * row.D / row.H;
    row.N0 = row.r * row.D0 / row.H;
    if (opt.mu) row.W = row.H / std::pow(row.r, fp.n + 2.0 * *opt.mu) * (row.N0 - *opt.mu);
  }
  return prof;
}

inline RadialProfile compute_profile(const FieldPair& fp, const Point& center, const ProfileOptions& opt = {}) {
  return compute_profile(fp, center, default_radii(fp, center), opt);
}

/// |LHS - RHS| of the Rellich identity on B_r(center)^+ for a field with known Laplacian.
inline double rellich_residual(const SampledField& w, int n, const Point& center, double r, int samples = 512) {
  if (!w.laplacian) throw ConfigError("rellich_residual: field has no Laplacian");
  const SphereQuadrature q = make_quadrature(n, center, r, samples);
  const double lhs = r * integrate(q.surface, [&](const Point& z) {
    const Point g = w.gradient(z);
    const double wr = dot(g, q.normal(z));
    return dot(g, g) - 2.0 * wr * wr;
  });
  const double grad2 = integrate(q.solid, [&](const Point& z) { return detail::grad_sq(w, z); });
  const double radial = integrate(q.solid, [&](const Point& z) { return dot(z - center, w.gradient(z)) * w.laplacian(z); });
  const double thin = integrate(q.thin, [&](const Point& z) {
    const Point g = w.gradient(z);
    return dot(z - center, g) * g[kY];
  });
  const double rhs = (n - 1) * grad2 - 2.0 * radial - 2.0 * thin;
  return std::abs(lhs - rhs);
}

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// (n / r^2) int_{B_r^+} w^2  against  (1 / r) int_{(dB_r)^+} w^2 + int_{B_r^+} |grad w|^2.
inline InequalitySides poincare_check(const SampledField& w, int n, const Point& center, double r,
                                      int samples = kDefaultSamples) {
  const SphereQuadrature q = make_quadrature(n, center, r, samples);
  InequalitySides s;
  s.lhs = n / (r * r) * integrate(q.solid, [&](const Point& z) { return w(z) * w(z); });
  s.rhs = integrate(q.surface, [&](const Point& z) { return w(z) * w(z); }) / r +
          integrate(q.solid, [&](const Point& z) { return detail::grad_sq(w, z); });
  return s;
}

/// int_{B_r'} w^2  against the bracket  r int_{B_r^+} |grad w|^2 + int_{(dB_r)^+} w^2.
inline InequalitySides trace_check(const SampledField& w, int n, const Point& center, double r,
                                   int samples = kDefaultSamples) {
  const SphereQuadrature q = make_quadrature(n, center, r, samples);
  InequalitySides s;
  s.lhs = integrate(q.thin, [&](const Point& z) { return w(z) * w(z); });
  s.rhs = r * integrate(q.solid, [&](const Point& z) { return detail::grad_sq(w, z); }) +
          integrate(q.surface, [&](const Point& z) { return w(z) * w(z); });
  return s;
}

struct MuEstimate {
  double mu_hat = 0.0;
  std::optional<int> mu_int;
  double slope = 0.0;  ///< dN0/dr of the fit
};

inline constexpr double kIntegerGate = 0.15;

/// Extrapolates N0 to r = 0 by a least-squares line in r over the smallest half of the radii.
inline MuEstimate estimate_mu(const std::vector<double>& radii, const std::vector<double>& n0) {
  if (radii.size() != n0.size()) throw ConfigError("estimate_mu: column length mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (std::isfinite(n0[k])) pts.push_back({radii[k], n0[k]});
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 8) throw DiagnosticError("estimate_mu: need at least 8 nondegenerate radii, have " + std::to_string(pts.size()));
  if (pts.back().first < 2.0 * pts.front().first * (1.0 - 1e-12)) {
    throw DiagnosticError("estimate_mu: radii must span at least a factor of 2");
  }
  const std::size_t m = (pts.size() + 1) / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    sx += pts[k].first;
    sy += pts[k].second;
    sxx += pts[k].first * pts[k].first;
    sxy += pts[k].first * pts[k].second;
  }
  const double det = m * sxx - sx * sx;
  MuEstimate est;
  est.slope = det > 0.0 ? (m * sxy - sx * sy) / det : 0.0;
  est.mu_hat = (sy - est.slope * sx) / m;
  const double nearest = std::round(est.mu_hat);
  if (std::abs(est.mu_hat - nearest) <= kIntegerGate && nearest >= 0.0) est.mu_int = static_cast<int>(nearest);
  return est;
}

inline MuEstimate estimate_mu(const RadialProfile& prof) {
  return estimate_mu(prof.column(&ProfileRow::r), prof.column(&ProfileRow::N0));
}

/// sup over (dB_r)^+ of |w| by dense sampling of the half sphere.
inline double sphere_sup(const SampledField& w, int n, const Point& center, double r, int samples = 512) {
  const SphereQuadrature q = make_quadrature(n, center, r, samples);
  double s = 0.0;
  for (const auto& node : q.surface) s = std::max(s, std::abs(w(node.z)));
  return s;
}

struct GrowthFit {
  double slope = 0.0;
  bool degenerate = false;
  std::vector<double> sups;
};

/// Least-squares slope of log sup_{(dB_r)^+} |w| against log r.
inline GrowthFit growth_fit(const SampledField& w, int n, const Point& center, const std::vector<double>& radii,
                            int samples = 512) {
  GrowthFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (double r : radii) {
    const double s = sphere_sup(w, n, center, r, samples);
    fit.sups.push_back(s);
    if (!(s > 0.0)) continue;
    const double x = std::log(r), y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

struct MonotonicityFit {
  double C = 0.0;     ///< minimal constant making the curve nondecreasing in r
  bool within = true;  ///< C lies in [0, c_max]
  std::size_t steps = 0;
};

inline constexpr double kMonotoneSlack = 1e-3;
inline constexpr double kMonotoneCMax = 50.0;

/// Minimal C in [0, 50] with r -> e^{Cr}(N(r) + 1) nondecreasing up to absolute slack per step.
inline MonotonicityFit almgren_constant(const RadialProfile& prof, double slack = kMonotoneSlack) {
  MonotonicityFit fit;
  const ProfileRow* prev = nullptr;
  for (const auto& row : prof.rows) {
    if (row.degenerate) continue;
    if (prev != nullptr) {
      ++fit.steps;
      const double a = prev->N + 1.0, b = row.N + 1.0;
      auto holds = [&](double C) { return std::exp(C * row.r) * b >= std::exp(C * prev->r) * a - slack; };
      if (!holds(fit.C)) {
        if (!(b > 0.0) || !holds(kMonotoneCMax)) {
          fit.C = kMonotoneCMax;
          fit.within = false;
        } else {
          double lo = fit.C, hi = kMonotoneCMax;
          for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (holds(mid) ? hi : lo) = mid;
          }
          fit.C = hi;
        }
      }
    }
    prev = &row;
  }
  return fit;
}

/// Minimal C in [0, 50] with r -> M(r) + C r nondecreasing up to absolute slack per step.
inline MonotonicityFit monneau_constant(const RadialProfile& prof, double slack = kMonotoneSlack) {
  MonotonicityFit fit;
  const ProfileRow* prev = nullptr;
  for (const auto& row : prof.rows) {
    if (!row.M) continue;
    if (prev != nullptr) {
      ++fit.steps;
      const double need = (*prev->M - *row.M - slack) / (row.r - prev->r);
      fit.C = std::max(fit.C, need);
    }
    prev = &row;
  }
  if (fit.C > kMonotoneCMax) fit.within = false;
  return fit;
}

/// Whether sign(W_mu) = sign(N0 - mu) on every nondegenerate row.
inline bool weiss_sign_consistent(const RadialProfile& prof) {
  if (!prof.mu) throw ConfigError("weiss_sign_consistent: profile computed without mu");
  for (const auto& row : prof.rows) {
    if (row.degenerate || !row.W) continue;
    const double d = row.N0 - *prof.mu;
    if ((*row.W > 0.0) != (d > 0.0) || (*row.W < 0.0) != (d < 0.0)) return false;
  }
  return true;
}

/// max_r r^{-2 mu} phi(r) divided by its max over the largest quartile of radii.
inline double phi_bound_ratio(const RadialProfile& prof, double mu) {
  std::vector<std::pair<double, double>> vals;
  for (const auto& row : prof.rows) {
    if (!row.degenerate) vals.push_back({row.r, std::pow(row.r, -2.0 * mu) * row.phi});
  }
  if (vals.size() < 4) throw DiagnosticError("phi_bound_ratio: need at least 4 nondegenerate radii");
  const std::size_t q = std::max<std::size_t>(1, vals.size() / 4);
  double top = 0.0, all = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    all = std::max(all, vals[k].second);
    if (k >= vals.size() - q) top = std::max(top, vals[k].second);
  }
  return all / top;
}

/// r^2 int_{B_r^+} |grad u|^2 / int_{B_2r^+} u^2, bounded by a dimensional constant.
inline double energy_estimate_ratio(const SampledField& u, int n, const Point& center, double r,
                                    int samples = kDefaultSamples) {
  const SphereQuadrature inner = make_quadrature(n, center, r, samples);
  const SphereQuadrature outer = make_quadrature(n, center, 2.0 * r, samples);
  const double grad = integrate(inner.solid, [&](const Point& z) { return detail::grad_sq(u, z); });
  const double mass = integrate(outer.solid, [&](const Point& z) { return u(z) * u(z); });
  if (!(mass > 0.0)) throw DiagnosticError("energy_estimate_ratio: u vanishes on B_2r");
  return r * r * grad / mass;
}

struct LocalBounds {
  double m1 = 0.0;  ///< sup |u| over nodes in B_R
  double m2 = 0.0;  ///< sup |v| over nodes in B_R
};

inline LocalBounds local_bounds(const SolveResult& result, double R) {
  const HalfBallGrid& g = result.grid();
  LocalBounds b;
  for (std::size_t id = 0; id < g.size(); ++id) {
    if (norm(g.position(id)) > R) continue;
    b.m1 = std::max(b.m1, std::abs(result.u[id]));
    b.m2 = std::max(b.m2, std::abs(result.v[id]));
  }
  return b;
}

}  // namespace bilap
