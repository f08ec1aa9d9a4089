#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bilap/corpus.hpp"
#include "bilap/diagnostics.hpp"
#include "bilap/oracle.hpp"

namespace {

using bilap::operator-;
using bilap::operator+;
using bilap::operator*;
using bilap::FieldPair;
using bilap::Point;

constexpr double pi = std::numbers::pi;
const Point origin{0, 0, 0};

bilap::ProfileOptions samples(int m) {
  bilap::ProfileOptions o;
  o.samples = m;
  return o;
}

bilap::ProfileOptions blowup_options(double mu, const bilap::HomogeneousHarmonicPoly& p) {
  bilap::ProfileOptions o;
  o.mu = mu;
  o.p_mu = &p;
  o.q_mu = &p;
  return o;
}

FieldPair analytic_pair(const bilap::SampledField& u, const bilap::SampledField& v) {
  FieldPair fp;
  fp.u = u;
  fp.v = v;
  return fp;
}

TEST(Profile, LinearPairMatchesReferenceIntegrals) {
  const auto x = bilap::harmonic_power(1);
  const auto prof = bilap::compute_profile(analytic_pair(x, x), origin, std::vector<double>{0.1, 0.3, 0.7}, samples(512));
  for (const auto& row : prof.rows) {
    const double r = row.r;
    const double D0 = 2 * bilap::oracle::reference_solid([](double, double) { return 1.0; }, r);
    const double H = 2 * bilap::oracle::reference_surface([](double rr, double t) { return std::pow(rr * std::cos(t), 2); }, r);
    EXPECT_NEAR(row.D0, D0, 1e-10 * D0);
    EXPECT_NEAR(row.H, H, 1e-10 * H);
    EXPECT_NEAR(row.N0, 1.0, 1e-3);
    EXPECT_NEAR(row.phi, H / r, 1e-10);
    // the closed forms quoted for this pair
    EXPECT_NEAR(row.D0, pi * r * r, 1e-10);
    EXPECT_NEAR(row.H, pi * r * r * r, 1e-10);
  }
}

TEST(Profile, HarmonicPowersHaveIntegerFrequency) {
  for (int mu : {1, 2, 3}) {
    const auto w = bilap::harmonic_power(mu);
    const auto fp = analytic_pair(w, w);
    const auto prof = bilap::compute_profile(fp, origin, bilap::default_radii(fp, origin), samples(512));
    ASSERT_GE(prof.rows.size(), 8u);
    for (const auto& row : prof.rows) EXPECT_NEAR(row.N0, mu, 1e-3) << "mu=" << mu << " r=" << row.r;
  }
}

TEST(Profile, ConstantField) {
  const auto fp = analytic_pair(bilap::constant_field(1.0), bilap::constant_field(0.0));
  const auto prof = bilap::compute_profile(fp, origin, std::vector<double>{0.05, 0.2, 0.9});
  for (const auto& row : prof.rows) {
    EXPECT_NEAR(row.phi, pi, 1e-4);
    EXPECT_NEAR(row.N0, 0.0, 1e-14);
    EXPECT_FALSE(row.degenerate);
  }
}

TEST(Profile, MonneauVanishesOnExactBlowup) {
  const auto w = bilap::harmonic_power(2);
  const bilap::HomogeneousHarmonicPoly p(1, 2, {1.0});
  const auto prof = bilap::compute_profile(analytic_pair(w, w), origin, std::vector<double>{0.1, 0.4, 0.8},
                                           blowup_options(2.0, p));
  for (const auto& row : prof.rows) {
    ASSERT_TRUE(row.M.has_value());
    EXPECT_NEAR(*row.M, 0.0, 1e-6);
    ASSERT_TRUE(row.W.has_value());
    EXPECT_NEAR(*row.W, 0.0, 1e-6);
  }
  EXPECT_TRUE(bilap::weiss_sign_consistent(prof));
}

TEST(Profile, ZeroFieldsAreFlaggedNotThrown) {
  const auto fp = analytic_pair(bilap::constant_field(0.0), bilap::constant_field(0.0));
  const auto prof = bilap::compute_profile(fp, origin, std::vector<double>{0.1, 0.2});
  for (const auto& row : prof.rows) {
    EXPECT_TRUE(row.degenerate);
    EXPECT_TRUE(std::isnan(row.N0));
  }
}

TEST(Profile, RadiusPreconditions) {
  auto fp = analytic_pair(bilap::harmonic_power(1), bilap::harmonic_power(1));
  fp.h = 0.1;
  EXPECT_THROW(bilap::compute_profile(fp, origin, std::vector<double>{0.2}), bilap::ConfigError);
  EXPECT_THROW(bilap::compute_profile(fp, Point{0.5, 0, 0}, std::vector<double>{0.6}), bilap::DomainError);
  EXPECT_THROW(bilap::compute_profile(fp, Point{0, 0, 0.1}, std::vector<double>{0.5}), bilap::ConfigError);
}

TEST(Profile, PerturbedFrequencyAddsCouplingTerms) {
  // u = v = 1: D0 = 0, D = int u v = |B_r^+| plus the thin term with reaction -1.
  auto fp = analytic_pair(bilap::constant_field(1.0), bilap::constant_field(1.0));
  fp.reaction = [](double) { return -1.0; };
  const auto prof = bilap::compute_profile(fp, origin, std::vector<double>{0.5});
  const double r = 0.5;
  EXPECT_NEAR(prof.rows[0].D, pi * r * r / 2 - 2 * r, 1e-12);
  EXPECT_NEAR(prof.rows[0].N, r * prof.rows[0].D / prof.rows[0].H, 1e-14);
}

TEST(Profile, NonnegativeFrequencyOnSmoothCorpus) {
  for (const auto& f : bilap::identity_corpus()) {
    const auto fp = analytic_pair(f.field, f.field);
    const auto prof = bilap::compute_profile(fp, Point{0.1, 0, 0}, std::vector<double>{0.1, 0.3, 0.6});
    for (const auto& row : prof.rows) {
      EXPECT_GE(row.N0, 0.0) << f.name;
      EXPECT_GT(row.H, 0.0) << f.name;
    }
  }
}

TEST(Rellich, ClosedFormExamples) {
  EXPECT_NEAR(bilap::rellich_residual(bilap::harmonic_power(1), 1, origin, 0.7), 0.0, 1e-4);
  EXPECT_NEAR(bilap::rellich_residual(bilap::harmonic_power(2), 1, origin, 0.7), 0.0, 1e-3);
  const auto y = bilap::analytic_field([](const Point& z) { return z[bilap::kY]; },
                                       [](const Point&) { return Point{0, 0, 1}; }, [](const Point&) { return 0.0; });
  EXPECT_NEAR(bilap::rellich_residual(y, 1, origin, 0.7), 0.0, 1e-3);
}

TEST(Rellich, CorpusResidualShrinksWithSamples) {
  for (const auto& f : bilap::identity_corpus()) {
    const double coarse = bilap::rellich_residual(f.field, 1, Point{0.1, 0, 0}, 0.5, 512);
    const double fine = bilap::rellich_residual(f.field, 1, Point{0.1, 0, 0}, 0.5, 1024);
    EXPECT_LE(coarse, 1e-3) << f.name;
    EXPECT_LE(fine, std::max(coarse / 2, 1e-12)) << f.name;
  }
}

TEST(Rellich, NeedsLaplacian) {
  auto w = bilap::harmonic_power(1);
  w.laplacian = nullptr;
  EXPECT_THROW(bilap::rellich_residual(w, 1, origin, 0.5), bilap::ConfigError);
}

TEST(Poincare, Examples) {
  const auto one = bilap::poincare_check(bilap::constant_field(1.0), 1, origin, 1.0, 512);
  EXPECT_NEAR(one.lhs, pi / 2, 1e-10);
  EXPECT_NEAR(one.rhs, pi, 1e-10);

  const auto x = bilap::poincare_check(bilap::harmonic_power(1), 1, origin, 1.0, 512);
  const double lhs = bilap::oracle::reference_solid([](double r, double t) { return std::pow(r * std::cos(t), 2); }, 1.0);
  const double rhs = bilap::oracle::reference_surface([](double r, double t) { return std::pow(r * std::cos(t), 2); }, 1.0) +
                     bilap::oracle::reference_solid([](double, double) { return 1.0; }, 1.0);
  EXPECT_NEAR(x.lhs, lhs, 1e-10);
  EXPECT_NEAR(x.rhs, rhs, 1e-10);
  EXPECT_LE(x.lhs, x.rhs + 1e-6);

  const auto zero = bilap::poincare_check(bilap::constant_field(0.0), 1, origin, 1.0);
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
}

TEST(Poincare, HoldsOnCorpus) {
  for (const auto& f : bilap::identity_corpus()) {
    for (double r : {0.2, 0.5, 0.85}) {
      const auto s = bilap::poincare_check(f.field, 1, Point{0.1, 0, 0}, r);
      EXPECT_LE(s.lhs, s.rhs + 1e-6) << f.name << " r=" << r;
    }
  }
}

TEST(Trace, Examples) {
  const auto one = bilap::trace_check(bilap::constant_field(1.0), 1, origin, 1.0, 512);
  EXPECT_NEAR(one.lhs, 2.0, 1e-12);
  EXPECT_NEAR(one.rhs, pi, 1e-10);
  EXPECT_NEAR(one.lhs / one.rhs, 2 / pi, 1e-10);

  const auto y = bilap::analytic_field([](const Point& z) { return z[bilap::kY]; },
                                       [](const Point&) { return Point{0, 0, 1}; });
  EXPECT_EQ(bilap::trace_check(y, 1, origin, 0.5).lhs, 0.0);

  const auto x = bilap::trace_check(bilap::harmonic_power(1), 1, origin, 1.0, 512);
  EXPECT_NEAR(x.lhs, bilap::oracle::reference_thin([](double t) { return t * t; }, 1.0), 1e-12);
  EXPECT_TRUE(std::isfinite(x.lhs / x.rhs));
}

TEST(Trace, UniformConstantOnCorpus) {
  double worst = 0.0;
  for (const auto& f : bilap::identity_corpus()) {
    for (double r : {0.2, 0.5, 0.85}) {
      const auto s = bilap::trace_check(f.field, 1, Point{0.1, 0, 0}, r);
      worst = std::max(worst, s.lhs / s.rhs);
    }
  }
  // 1D trace constant on a half disk: of order one
  EXPECT_LT(worst, 2.0);
}

TEST(EstimateMu, Examples) {
  std::vector<double> r, n0;
  for (int k = 0; k < 12; ++k) r.push_back(0.8 * std::pow(2.0, -k / 4.0));
  n0.assign(r.size(), 2.0);
  auto e = bilap::estimate_mu(r, n0);
  EXPECT_NEAR(e.mu_hat, 2.0, 1e-12);
  EXPECT_EQ(e.mu_int, 2);

  n0.clear();
  for (double x : r) n0.push_back(1.0 + 0.3 * x);
  e = bilap::estimate_mu(r, n0);
  EXPECT_NEAR(e.mu_hat, 1.0, 0.02);
  EXPECT_EQ(e.mu_int, 1);

  n0.assign(r.size(), 1.5);
  e = bilap::estimate_mu(r, n0);
  EXPECT_NEAR(e.mu_hat, 1.5, 1e-12);
  EXPECT_FALSE(e.mu_int.has_value());
}

TEST(EstimateMu, Preconditions) {
  std::vector<double> r{0.1, 0.2, 0.3}, n0{1, 1, 1};
  EXPECT_THROW(bilap::estimate_mu(r, n0), bilap::DiagnosticError);
  r.clear();
  for (int k = 0; k < 8; ++k) r.push_back(0.5 + 0.01 * k);
  n0.assign(8, 1.0);
  EXPECT_THROW(bilap::estimate_mu(r, n0), bilap::DiagnosticError);
}

TEST(Growth, Examples) {
  std::vector<double> radii;
  for (int k = 0; k < 12; ++k) radii.push_back(0.8 * std::pow(2.0, -k / 4.0));
  EXPECT_NEAR(bilap::growth_fit(bilap::harmonic_power(2), 1, origin, radii).slope, 2.0, 1e-3);
  EXPECT_NEAR(bilap::growth_fit(bilap::constant_field(3.0), 1, origin, radii).slope, 0.0, 1e-3);

  const auto mixed = bilap::sum(bilap::harmonic_power(1), bilap::harmonic_power(3));
  std::vector<double> small, large;
  for (int k = 0; k < 8; ++k) {
    small.push_back(0.05 * std::pow(2.0, -k / 4.0));
    large.push_back(0.8 * std::pow(2.0, -k / 4.0));
  }
  const double s_small = bilap::growth_fit(mixed, 1, origin, small).slope;
  const double s_large = bilap::growth_fit(mixed, 1, origin, large).slope;
  EXPECT_LT(std::abs(s_small - 1.0), std::abs(s_large - 1.0));
  EXPECT_NEAR(s_small, 1.0, 1e-2);

  EXPECT_TRUE(bilap::growth_fit(bilap::constant_field(0.0), 1, origin, radii).degenerate);
}

bilap::RadialProfile synthetic_profile(const std::vector<double>& r, const std::vector<double>& N) {
  bilap::RadialProfile prof;
  for (std::size_t k = 0; k < r.size(); ++k) {
    bilap::ProfileRow row;
    row.r = r[k];
    row.N = N[k];
    row.H = 1.0;
    prof.rows.push_back(row);
  }
  return prof;
}

TEST(Almgren, MinimalConstant) {
  // nondecreasing already
  EXPECT_EQ(bilap::almgren_constant(synthetic_profile({0.1, 0.2, 0.4}, {1.0, 1.1, 1.2})).C, 0.0);
  // a drop that needs e^{C dr} >= ratio
  const auto fit = bilap::almgren_constant(synthetic_profile({0.1, 0.2}, {1.5, 1.0}), 0.0);
  EXPECT_NEAR(fit.C, std::log(2.5 / 2.0) / 0.1, 1e-8);
  EXPECT_TRUE(fit.within);
  // impossible within [0, 50]
  EXPECT_FALSE(bilap::almgren_constant(synthetic_profile({0.1, 0.11}, {10.0, 0.0}), 0.0).within);
}

TEST(Monneau, MinimalConstant) {
  bilap::RadialProfile prof;
  for (double r : {0.1, 0.2, 0.3}) {
    bilap::ProfileRow row;
    row.r = r;
    row.M = 1.0 - r;  // M + C r nondecreasing needs C >= 1
    prof.rows.push_back(row);
  }
  EXPECT_NEAR(bilap::monneau_constant(prof, 0.0).C, 1.0, 1e-12);
  EXPECT_LT(bilap::monneau_constant(prof).C, 1.0);
}

TEST(PhiBound, HomogeneousPairIsFlat) {
  const auto w = bilap::harmonic_power(2);
  const auto fp = analytic_pair(w, w);
  const auto prof = bilap::compute_profile(fp, origin, bilap::default_radii(fp, origin));
  EXPECT_NEAR(bilap::phi_bound_ratio(prof, 2.0), 1.0, 1e-6);
}

TEST(EnergyEstimate, Bounded) {
  for (const auto& f : bilap::identity_corpus()) {
    const double ratio = bilap::energy_estimate_ratio(f.field, 1, Point{0.1, 0, 0}, 0.2);
    EXPECT_TRUE(std::isfinite(ratio)) << f.name;
    EXPECT_GT(ratio, 0.0) << f.name;
  }
}

TEST(DefaultRadii, GeometricAndBounded) {
  FieldPair fp;
  fp.h = 1.0 / 32;
  const auto r = bilap::default_radii(fp, Point{0.2, 0, 0});
  ASSERT_GE(r.size(), 8u);
  EXPECT_GE(r.front(), 4.0 / 32 - 1e-12);
  EXPECT_LE(r.back(), 0.9 * 0.8 + 1e-12);
  for (std::size_t k = 1; k < r.size(); ++k) EXPECT_NEAR(r[k] / r[k - 1], std::pow(2.0, 0.25), 1e-12);
}

}  // namespace
