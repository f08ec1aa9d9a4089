#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bilap/corpus.hpp"
#include "bilap/freeboundary.hpp"
#include "bilap/oracle.hpp"

namespace {

using bilap::operator-;
using bilap::operator+;
using bilap::operator*;
using bilap::FieldPair;
using bilap::Point;

constexpr double pi = std::numbers::pi;
const Point origin{0, 0, 0};

bilap::ScalarField trace_field(double h, const std::function<double(double)>& f) {
  return bilap::ScalarField::from_function(bilap::build_grid(1, h), [&](const Point& z) { return f(z[0]); });
}

FieldPair analytic_pair(const bilap::SampledField& u, const bilap::SampledField& v) {
  FieldPair fp;
  fp.u = u;
  fp.v = v;
  return fp;
}

TEST(ExtractGamma, LinearTrace) {
  const auto pts = bilap::extract_gamma(trace_field(1.0 / 16, [](double x) { return x; }));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].location[0], 0.0, 1e-14);
  EXPECT_TRUE(pts[0].in_plus && pts[0].in_minus);
  EXPECT_EQ(pts[0].side(), "both");
}

TEST(ExtractGamma, QuadraticTrace) {
  const auto pts = bilap::extract_gamma(trace_field(1.0 / 16, [](double x) { return x * x - 0.25; }));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].location[0], -0.5, 1e-12);
  EXPECT_NEAR(pts[1].location[0], 0.5, 1e-12);
  for (const auto& p : pts) EXPECT_EQ(p.side(), "both");
}

TEST(ExtractGamma, OffNodeCrossingIsInterpolated) {
  const auto pts = bilap::extract_gamma(trace_field(1.0 / 16, [](double x) { return x - 0.1; }));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].location[0], 0.1, 1e-12);
}

TEST(ExtractGamma, NoSignChange) {
  EXPECT_TRUE(bilap::extract_gamma(trace_field(1.0 / 16, [](double) { return 1.0; })).empty());
}

TEST(ExtractGamma, PlateauEndpoints) {
  // u = 0 on [-0.25, 0.25], positive outside: two endpoints, each on the boundary of {u > 0} only
  const auto pts = bilap::extract_gamma(
      trace_field(1.0 / 16, [](double x) { return std::max(0.0, std::abs(x) - 0.25); }));
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0].location[0], -0.25, 1e-12);
  EXPECT_NEAR(pts[1].location[0], 0.25, 1e-12);
  for (const auto& p : pts) EXPECT_EQ(p.side(), "plus");
}

TEST(Classify, AnalyticExamples) {
  const auto x = bilap::harmonic_power(1), q = bilap::harmonic_power(2);
  bilap::FreeBoundaryPoint p;
  p.location = origin;
  EXPECT_EQ(bilap::classify_point(p, x, x, 1, 0.1), bilap::PointClass::Regular);
  EXPECT_EQ(p.tag, bilap::kRegularTag);
  EXPECT_EQ(bilap::classify_point(p, q, q, 1, 0.1), bilap::PointClass::Singular);
  EXPECT_TRUE(p.tag.empty());
  EXPECT_EQ(bilap::classify_point(p, x, q, 1, 0.1), bilap::PointClass::Singular);
}

TEST(Classify, GridThresholdIsTenH) {
  const double h = 1.0 / 32;
  const auto g = bilap::build_grid(1, h);
  const auto u = bilap::ScalarField::from_function(g, [](const Point& z) { return z[0]; });
  auto pts = bilap::extract_gamma(u);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(bilap::classify_point(pts[0], u, u), bilap::PointClass::Regular);
  EXPECT_NEAR(pts[0].threshold, 10 * h, 1e-15);
  EXPECT_NEAR(pts[0].grad_u, 1.0, 1e-12);
  // slope below 10 h in v
  const auto v = bilap::ScalarField::from_function(g, [h](const Point& z) { return 5 * h * z[0]; });
  EXPECT_EQ(bilap::classify_point(pts[0], u, v), bilap::PointClass::Singular);
}

TEST(AlmgrenRescale, LinearPair) {
  const auto x = bilap::harmonic_power(1);
  const auto fp = analytic_pair(x, x);
  const auto rs = bilap::almgren_rescale(fp, origin, 0.5, 512);
  // H = 2 pi r^3 / 2 = pi r^3 for the pair, phi = pi r^2, u_r(z) = r z1 / (r sqrt(pi))
  const double phi = bilap::oracle::reference_surface([](double r, double t) { return 2 * std::pow(r * std::cos(t), 2); }, 0.5) / 0.5;
  EXPECT_NEAR(phi, pi * 0.25, 1e-10);
  for (const Point& z : {Point{0.3, 0, 0.2}, Point{-0.7, 0, 0.1}}) {
    EXPECT_NEAR(rs.u(z), z[0] / std::sqrt(pi), 1e-10);
    EXPECT_NEAR(rs.v(z), z[0] / std::sqrt(pi), 1e-10);
  }
  EXPECT_NEAR(rs.normalization, 1.0, 1e-3);
}

TEST(AlmgrenRescale, NormalizationOnCorpus) {
  for (const auto& f : bilap::identity_corpus()) {
    const auto fp = analytic_pair(f.field, bilap::harmonic_power(1));
    EXPECT_NEAR(bilap::almgren_rescale(fp, Point{0.1, 0, 0}, 0.3).normalization, 1.0, 1e-3) << f.name;
  }
}

TEST(AlmgrenRescale, Preconditions) {
  auto fp = analytic_pair(bilap::harmonic_power(1), bilap::harmonic_power(1));
  fp.h = 1.0 / 16;
  EXPECT_THROW(bilap::almgren_rescale(fp, origin, 0.2), bilap::ConfigError);
  const auto zero = analytic_pair(bilap::constant_field(0), bilap::constant_field(0));
  EXPECT_THROW(bilap::almgren_rescale(zero, origin, 0.5), bilap::DiagnosticError);
}

TEST(HomogeneousRescale, ExactHomogeneity) {
  const auto q = bilap::harmonic_power(2);
  const auto cube = bilap::analytic_field([](const Point& z) { return z[0] * z[0] * z[0]; },
                                          [](const Point& z) { return Point{3 * z[0] * z[0], 0, 0}; });
  for (double r : {0.1, 0.37, 0.9}) {
    const auto qr = bilap::homogeneous_rescale(q, origin, r, 2);
    const auto cr = bilap::homogeneous_rescale(cube, origin, r, 3);
    for (const Point& z : {Point{0.3, 0, 0.2}, Point{-0.7, 0, 0.5}}) {
      EXPECT_NEAR(qr(z), q(z), 1e-12);
      EXPECT_NEAR(cr(z), cube(z), 1e-12);
    }
  }
  EXPECT_THROW(bilap::homogeneous_rescale(q, origin, 0.1, 2, 0.05), bilap::ConfigError);
}

TEST(HomogeneousRescale, RemainderDecaysLinearly) {
  const auto w = bilap::sum(bilap::harmonic_power(2), bilap::harmonic_power(3));
  const Point z{0.4, 0, 0.3};
  const double e1 = std::abs(bilap::homogeneous_rescale(w, origin, 0.2, 2)(z) - bilap::harmonic_power(2)(z));
  const double e2 = std::abs(bilap::homogeneous_rescale(w, origin, 0.1, 2)(z) - bilap::harmonic_power(2)(z));
  EXPECT_NEAR(e1 / e2, 2.0, 1e-9);
}

TEST(BlowupFit, ExactQuadratic) {
  const auto w = bilap::harmonic_power(2);
  const auto fit = bilap::blowup_fit(analytic_pair(w, w), origin, {0.1, 0.2, 0.4}, 2);
  EXPECT_NEAR(fit.p_mu.coefficients()[0], 1.0, 1e-6);
  EXPECT_NEAR(fit.q_mu.coefficients()[0], 1.0, 1e-6);
  for (double r : fit.residual) EXPECT_NEAR(r, 0.0, 1e-10);
}

TEST(BlowupFit, PerturbedQuadraticResidualLinearInR) {
  const double eps = 1e-3;
  const auto w = bilap::sum(bilap::harmonic_power(2), bilap::harmonic_power(3), eps);
  std::vector<double> radii;
  for (int k = 0; k < 12; ++k) radii.push_back(0.8 * std::pow(2.0, -k / 4.0));
  const auto fit = bilap::blowup_fit(analytic_pair(w, w), origin, radii, 2);
  EXPECT_NEAR(fit.p_mu.coefficients()[0], 1.0, 1e-3);
  for (std::size_t k = 0; k < fit.radii.size(); ++k) {
    EXPECT_NEAR(fit.residual[k] / fit.radii[k], fit.residual.back() / fit.radii.back(), 1e-3 * fit.residual.back() / fit.radii.back() + 1e-9);
  }
  for (std::size_t k = 1; k < fit.residual.size(); ++k) EXPECT_GE(fit.residual[k] + 1e-3, fit.residual[k - 1]);
}

TEST(BlowupFit, WrongDegreeLeavesResidual) {
  const auto w = bilap::harmonic_power(2);
  const auto fp = analytic_pair(w, w);
  EXPECT_THROW(bilap::blowup_fit(fp, origin, {0.1, 0.3}, 1), bilap::DiagnosticError);
  EXPECT_THROW(bilap::blowup_fit(fp, origin, {0.1, 0.3}, 0), bilap::ConfigError);
  EXPECT_EQ(bilap::best_fit_degree(fp, origin, 0.3), 2);
}

TEST(BestFitDegree, PicksHomogeneousDegree) {
  for (int mu : {0, 1, 2, 3, 4}) {
    const auto w = mu == 0 ? bilap::constant_field(1.0) : bilap::harmonic_power(mu);
    EXPECT_EQ(bilap::best_fit_degree(analytic_pair(w, w), origin, 0.5), mu);
  }
}

TEST(Nondegeneracy, Examples) {
  std::vector<double> radii{0.05, 0.1, 0.2, 0.4, 0.8};
  const auto q = bilap::harmonic_power(2);
  const auto nd = bilap::nondegeneracy_check(analytic_pair(q, bilap::constant_field(0)), origin, radii, 2);
  EXPECT_NEAR(nd.c_min, 1.0, 1e-4);
  EXPECT_FALSE(nd.degenerate);

  const auto zero = bilap::nondegeneracy_check(analytic_pair(bilap::constant_field(0), bilap::constant_field(0)),
                                               origin, radii, 2);
  EXPECT_EQ(zero.c_min, 0.0);
  EXPECT_TRUE(zero.degenerate);

  const auto c = bilap::harmonic_power(3);
  const auto weak = bilap::nondegeneracy_check(analytic_pair(c, c), origin, radii, 2);
  EXPECT_TRUE(weak.degenerate);
  EXPECT_LT(weak.ratios.front(), weak.ratios.back());
}

TEST(HarmonicPoly, BasisIsHarmonicEvenHomogeneous) {
  for (int n : {1, 2}) {
    for (int deg = 0; deg <= 5; ++deg) {
      const auto basis = bilap::harmonic_basis(n, deg);
      EXPECT_EQ(basis.size(), n == 1 ? 1u : static_cast<std::size_t>(deg + 1));
      for (const auto& b : basis) {
        EXPECT_TRUE(b.laplacian().is_zero());
        for (const auto& [e, c] : b.terms) {
          EXPECT_EQ(e[bilap::kY] % 2, 0);
          EXPECT_EQ(e[0] + e[1] + e[2], deg);
        }
        const Point z{0.3, n == 2 ? -0.2 : 0.0, 0.4};
        EXPECT_NEAR(b(bilap::mirror(z)), b(z), 1e-14);
        EXPECT_NEAR(b(2.0 * z), std::pow(2.0, deg) * b(z), 1e-12);
      }
    }
  }
}

TEST(HarmonicPoly, PlaneBasisIsRealPower) {
  for (int deg = 0; deg <= 5; ++deg) {
    const bilap::HomogeneousHarmonicPoly p(1, deg, {1.0});
    EXPECT_TRUE(p.harmonic());
    const auto w = bilap::harmonic_power(deg);
    for (const Point& z : {Point{0.3, 0, 0.4}, Point{-0.8, 0, 0.1}}) EXPECT_NEAR(p(z), w(z), 1e-12);
  }
}

TEST(SingularDimension, Examples) {
  // n = 2, basis element b is the extension of x1^(2-b) x2^b
  const bilap::HomogeneousHarmonicPoly saddle(2, 2, {1.0, 0.0, -1.0});  // x1^2 - x2^2
  const bilap::HomogeneousHarmonicPoly x1sq(2, 2, {1.0, 0.0, 0.0});     // x1^2 - y^2
  EXPECT_EQ(bilap::singular_dimension(saddle, saddle), 0);
  EXPECT_EQ(bilap::annihilator_dimension(x1sq), 1);
  EXPECT_EQ(bilap::singular_dimension(saddle, x1sq), 1);

  const bilap::HomogeneousHarmonicPoly quad(1, 2, {1.0});
  EXPECT_EQ(bilap::singular_dimension(quad, quad), 0);
  EXPECT_THROW(bilap::singular_dimension(bilap::HomogeneousHarmonicPoly::zero(1, 2), quad), bilap::DiagnosticError);
}

TEST(SingularDimension, ScaleInvariant) {
  const bilap::HomogeneousHarmonicPoly a(2, 3, {1.0, 0.5, 0.0, -2.0});
  const bilap::HomogeneousHarmonicPoly b(2, 3, {0.0, 0.0, 1.0, 0.0});
  const int d = bilap::singular_dimension(a, b);
  for (double s : {-3.0, 1e-4, 7.0}) {
    std::vector<double> ca = a.coefficients(), cb = b.coefficients();
    for (double& c : ca) c *= s;
    for (double& c : cb) c /= s;
    EXPECT_EQ(bilap::singular_dimension(bilap::HomogeneousHarmonicPoly(2, 3, ca), bilap::HomogeneousHarmonicPoly(2, 3, cb)), d);
  }
}

TEST(Continuity, Examples) {
  const auto make = [](double x, double c) {
    bilap::FreeBoundaryPoint p;
    p.location = Point{x, 0, 0};
    p.p_mu = bilap::HomogeneousHarmonicPoly(1, 2, {c});
    p.q_mu = bilap::HomogeneousHarmonicPoly(1, 2, {c});
    return p;
  };
  EXPECT_EQ(bilap::continuity_probe({make(0.0, 1.0), make(0.1, 1.0)}), 0.0);
  const double delta = 0.01;
  const double basis_norm = bilap::surface_distance(bilap::HomogeneousHarmonicPoly(1, 2, {1.0}),
                                                    bilap::HomogeneousHarmonicPoly::zero(1, 2));
  EXPECT_NEAR(basis_norm, std::sqrt(pi / 2), 1e-10);
  EXPECT_NEAR(bilap::continuity_probe({make(0.0, 1.0), make(0.1, 1.0 + delta)}), 2 * delta * basis_norm, 1e-12);
  EXPECT_THROW(bilap::continuity_probe({make(0.0, 1.0)}), bilap::ConfigError);
}

}  // namespace
