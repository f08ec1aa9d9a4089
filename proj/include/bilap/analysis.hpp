#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bilap/diagnostics.hpp"
#include "bilap/freeboundary.hpp"
#include "bilap/solver.hpp"

namespace bilap {

struct AnalysisOptions {
  int samples = kDefaultSamples;
  double radii_min = 0.0;  ///< 0 means 4h
  bool blowup = true;
};

/// Everything measured around one thin-space center of a solved problem.
struct CenterReport {
  Point center{};
  std::vector<double> radii;
  RadialProfile profile;
  std::optional<MuEstimate> mu;
  std::string mu_error;  ///< why mu could not be estimated
  MonotonicityFit almgren;
  GrowthFit growth;
  std::optional<int> best_degree;
  std::optional<BlowupFit> blowup;
  std::optional<MonotonicityFit> monneau;
  std::optional<Nondegeneracy> nondegeneracy;
  std::string blowup_error;
  double u_value = 0.0;  ///< interpolated u at the center
  double v_value = 0.0;  ///< interpolated v at the center
};

/// The smallest half of an ascending radius list (at least two radii when available).
inline std::vector<double> small_half(const std::vector<double>& radii) {
  const std::size_t m = std::max<std::size_t>(std::min<std::size_t>(2, radii.size()), (radii.size() + 1) / 2);
  return {radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(m)};
}

inline CenterReport analyze_center(const FieldPair& fp, const Point& center, const AnalysisOptions& opt = {}) {
  CenterReport rep;
  rep.center = center;
  rep.u_value = fp.u(center);
  rep.v_value = fp.v(center);
  rep.radii = default_radii(fp, center, opt.radii_min);
  if (rep.radii.empty()) throw DiagnosticError("analyze_center: no admissible radius at this center");

  ProfileOptions po;
  po.samples = opt.samples;
  rep.profile = compute_profile(fp, center, rep.radii, po);
  try {
    rep.mu = estimate_mu(rep.profile);
  } catch (const DiagnosticError& e) {
    rep.mu_error = e.what();
  }
  rep.almgren = almgren_constant(rep.profile);
  rep.growth = growth_fit(fp.u, fp.n, center, small_half(rep.radii));
  rep.best_degree = best_fit_degree(fp, center, rep.radii.front(), 4, opt.samples);

  if (rep.mu && rep.mu->mu_int) {
    po.mu = static_cast<double>(*rep.mu->mu_int);
    if (opt.blowup && *rep.mu->mu_int >= 1) {
      try {
        rep.blowup = blowup_fit(fp, center, rep.radii, *rep.mu->mu_int, opt.samples);
        po.p_mu = &rep.blowup->p_mu;
        po.q_mu = &rep.blowup->q_mu;
        rep.nondegeneracy = nondegeneracy_check(fp, center, rep.radii, *po.mu);
      } catch (const DiagnosticError& e) {
        rep.blowup_error = e.what();
      }
    }
    rep.profile = compute_profile(fp, center, rep.radii, po);
    if (po.p_mu != nullptr) rep.monneau = monneau_constant(rep.profile);
  }
  return rep;
}

/// A free boundary point with its classification and center analysis filled in.
struct PointReport {
  FreeBoundaryPoint point;
  CenterReport analysis;
};

inline std::vector<PointReport> analyze_free_boundary(const SolveResult& result, const ProblemSpec& spec,
                                                      const AnalysisOptions& opt = {}) {
  const FieldPair fp = solution_pair(result, spec);
  std::vector<PointReport> out;
  for (FreeBoundaryPoint p : extract_gamma(result.u)) {
    classify_point(p, result.u, result.v);
    PointReport rep{p, {}};
    try {
      rep.analysis = analyze_center(fp, p.location, opt);
    } catch (const DiagnosticError& e) {
      rep.analysis.center = p.location;
      rep.analysis.mu_error = e.what();
      out.push_back(std::move(rep));
      continue;
    }
    const CenterReport& a = rep.analysis;
    if (a.mu) {
      rep.point.mu_hat = a.mu->mu_hat;
      rep.point.mu_int = a.mu->mu_int;
    }
    if (a.blowup) {
      rep.point.p_mu = a.blowup->p_mu;
      rep.point.q_mu = a.blowup->q_mu;
      rep.point.fit_residual = a.blowup->residual.front();
      if (*rep.point.classification == PointClass::Singular && !a.blowup->p_mu.is_zero() && !a.blowup->q_mu.is_zero()) {
        rep.point.stratum_dim = singular_dimension(a.blowup->p_mu, a.blowup->q_mu);
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace bilap
