#include <cmath>

#include <gtest/gtest.h>

#include "bilap/analysis.hpp"
#include "bilap/corpus.hpp"

namespace {

using bilap::Point;

bilap::ProblemSpec corpus_spec(const std::string& name, double h) {
  for (const auto& np : bilap::solve_corpus()) {
    if (np.name != name) continue;
    bilap::ProblemSpec s = np.spec;
    s.h = h;
    s.tol_grad_rel = 1e-10;
    return s;
  }
  throw std::runtime_error("no corpus entry " + name);
}

// u = x + b y^2 - (lambda/6) x y^3 is biharmonic, even-compatible (u_y = 0 on y = 0) and meets
// the thin condition d_y(Lap u) = -lambda u for p = 2. Its trace changes sign at 0 while Lap u(0) = 2b.
TEST(LocalSolution, SignChangeWithNonvanishingLaplacian) {
  const double b = 0.3, lambda = 1.7;
  auto u = [=](double x, double y) { return x + b * y * y - lambda / 6 * x * y * y * y; };
  const double e = 1e-3;
  auto lap = [&](double x, double y) {
    return (u(x + e, y) + u(x - e, y) + u(x, y + e) + u(x, y - e) - 4 * u(x, y)) / (e * e);
  };
  bilap::ProblemSpec spec;
  spec.lambda_plus = spec.lambda_minus = lambda;
  for (double x : {-0.4, -0.1, 0.2, 0.5}) {
    for (double y : {0.1, 0.3}) {
      const double bilap_u = (lap(x + e, y) + lap(x - e, y) + lap(x, y + e) + lap(x, y - e) - 4 * lap(x, y)) / (e * e);
      EXPECT_NEAR(bilap_u, 0.0, 1e-2) << x << "," << y;
    }
    EXPECT_NEAR((u(x, e) - u(x, -e)) / (2 * e), 0.0, 1e-6);
    const double lap_y = (lap(x, 2 * e) - lap(x, 0.0)) / (2 * e);
    EXPECT_NEAR(lap_y, bilap::thin_reaction(u(x, 0.0), spec), 1e-3) << x;
  }
  EXPECT_LT(u(-0.1, 0.0), 0.0);
  EXPECT_GT(u(0.1, 0.0), 0.0);
  EXPECT_NEAR(lap(0.0, 0.0), 2 * b, 1e-6);
}

TEST(FreeBoundary, VAtSignChangeStaysOrderOneUnderRefinement) {
  for (const char* name : {"linear-shift", "trig-asym"}) {
    double prev = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const auto spec = corpus_spec(name, h);
      const auto res = bilap::minimize(spec);
      const auto pts = bilap::extract_gamma(res.u);
      ASSERT_EQ(pts.size(), 1u) << name;
      const double v = std::abs(bilap::interp(res.v, pts[0].location));
      EXPECT_GT(v, 0.03) << name << " h=" << h;
      if (prev > 0.0) {
        EXPECT_NEAR(v, prev, 0.25 * prev) << name << " h=" << h;
      }
      prev = v;
    }
  }
}

TEST(FreeBoundary, RegularPointWithVanishingVHasFrequencyOne) {
  const auto spec = corpus_spec("trig-odd-p3", 1.0 / 64);
  const auto res = bilap::minimize(spec);
  const auto pts = bilap::analyze_free_boundary(res, spec);
  ASSERT_EQ(pts.size(), 1u);
  const auto& p = pts[0];
  EXPECT_NEAR(p.point.location[0], 0.0, 1e-9);
  EXPECT_EQ(p.point.classification, bilap::PointClass::Regular);
  EXPECT_NEAR(p.analysis.v_value, 0.0, 1e-9);
  ASSERT_TRUE(p.point.mu_hat.has_value());
  EXPECT_NEAR(*p.point.mu_hat, 1.0, 0.15);
  EXPECT_EQ(p.point.mu_int, 1);
  EXPECT_EQ(p.analysis.best_degree, 1);
}

TEST(FreeBoundary, NonvanishingVDragsFrequencyBelowOne) {
  const auto spec = corpus_spec("linear-shift", 1.0 / 64);
  const auto res = bilap::minimize(spec);
  const auto pts = bilap::analyze_free_boundary(res, spec);
  ASSERT_EQ(pts.size(), 1u);
  ASSERT_TRUE(pts[0].point.mu_hat.has_value());
  EXPECT_GT(std::abs(pts[0].analysis.v_value), 0.03);
  EXPECT_LT(*pts[0].point.mu_hat, 0.85);
  EXPECT_EQ(pts[0].analysis.best_degree, 1);
}

TEST(Corpus, AlmgrenConstantAndGrowthOnEveryPoint) {
  for (const auto& np : bilap::solve_corpus()) {
    const auto spec = corpus_spec(np.name, 1.0 / 32);
    const auto res = bilap::minimize(spec);
    for (const auto& p : bilap::analyze_free_boundary(res, spec)) {
      EXPECT_TRUE(p.analysis.almgren.within) << np.name;
      EXPECT_GE(p.analysis.almgren.C, 0.0);
      EXPECT_FALSE(p.analysis.growth.degenerate);
      if (p.analysis.mu) {
        EXPECT_GE(p.analysis.growth.slope, p.analysis.mu->mu_hat - 0.1) << np.name;
      }
    }
  }
}

TEST(Corpus, OddDataPinAPointAtTheOrigin) {
  for (const char* name : {"cubic-odd", "trig-odd-p3"}) {
    const auto res = bilap::minimize(corpus_spec(name, 1.0 / 32));
    bool found = false;
    for (const auto& p : bilap::extract_gamma(res.u)) found = found || std::abs(p.location[0]) < 1e-9;
    EXPECT_TRUE(found) << name;
  }
}

}  // namespace
