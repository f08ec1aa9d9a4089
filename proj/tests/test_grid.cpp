#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "bilap/field.hpp"
#include "bilap/grid.hpp"
#include "bilap/oracle.hpp"
#include "bilap/quadrature.hpp"

namespace {

using bilap::Point;
using bilap::operator-;
using bilap::operator+;
using bilap::operator*;
constexpr double pi = std::numbers::pi;

// Independent enumeration of lattice points with y >= 0 and x^2 + y^2 <= 1 (n = 1).
std::size_t enumerate_half_disk(double h) {
  std::size_t count = 0;
  const int m = static_cast<int>(std::lround(1.0 / h));
  for (int i = -m; i <= m; ++i) {
    for (int k = 0; k <= m; ++k) {
      const double x = i * h, y = k * h;
      if (x * x + y * y <= 1.0 + 1e-12) ++count;
    }
  }
  return count;
}

TEST(Grid, UnitSpacingHasFourNodes) {
  const auto g = bilap::build_grid(1, 1.0);
  ASSERT_EQ(g->size(), 4u);
  std::set<std::pair<double, double>> pts;
  for (std::size_t id = 0; id < g->size(); ++id) pts.insert({g->position(id)[0], g->position(id)[bilap::kY]});
  const std::set<std::pair<double, double>> expected{{-1, 0}, {0, 0}, {1, 0}, {0, 1}};
  EXPECT_EQ(pts, expected);
}

TEST(Grid, NodeCountMatchesLatticeEnumeration) {
  for (double h : {0.5, 0.25, 0.125, 1.0 / 32}) {
    EXPECT_EQ(bilap::build_grid(1, h)->size(), enumerate_half_disk(h)) << "h = " << h;
  }
  // The closed half disk at h = 1/2 holds 5 + 3 + 1 lattice points.
  EXPECT_EQ(bilap::build_grid(1, 0.5)->size(), 9u);
}

TEST(Grid, RejectsBadInput) {
  EXPECT_THROW(bilap::build_grid(1, 0.3), bilap::ConfigError);
  EXPECT_THROW(bilap::build_grid(3, 0.25), bilap::ConfigError);
  EXPECT_THROW(bilap::build_grid(0, 0.25), bilap::ConfigError);
  EXPECT_THROW(bilap::build_grid(1, -0.5), bilap::ConfigError);
}

TEST(Grid, InvariantsHold) {
  for (int n : {1, 2}) {
    const double h = n == 1 ? 1.0 / 16 : 1.0 / 8;
    const auto g = bilap::build_grid(n, h);
    std::size_t counts[4] = {0, 0, 0, 0};
    for (std::size_t id = 0; id < g->size(); ++id) {
      const Point z = g->position(id);
      EXPECT_GE(z[bilap::kY], 0.0);
      EXPECT_LE(bilap::norm(z), 1.0 + h);
      ++counts[static_cast<int>(g->node_class(id))];
      const auto l = g->lattice(id);
      EXPECT_EQ(bilap::reflect(bilap::reflect(l)), l);
      EXPECT_EQ(g->find(bilap::reflect(l)), id);
      if (g->node_class(id) == bilap::NodeClass::Thin || g->node_class(id) == bilap::NodeClass::Corner) {
        EXPECT_EQ(z[bilap::kY], 0.0);
      }
    }
    EXPECT_EQ(counts[0] + counts[1] + counts[2] + counts[3], g->size());
    EXPECT_EQ(g->free_nodes().size() + g->dirichlet_nodes().size(), g->size());
    EXPECT_EQ(g->thin_nodes().size(), counts[static_cast<int>(bilap::NodeClass::Thin)]);
    // Every free node has its full stencil inside the node set.
    for (std::size_t id : g->free_nodes()) {
      for (int a = 0; a <= n; ++a) {
        EXPECT_NE(g->neighbor(id, a, 1), bilap::HalfBallGrid::npos);
        EXPECT_NE(g->neighbor(id, a, -1), bilap::HalfBallGrid::npos);
      }
    }
  }
}

TEST(Interp, ReproducesAffineAndConstants) {
  const auto g = bilap::build_grid(1, 0.125);
  const auto fx = bilap::ScalarField::from_function(g, [](const Point& z) { return z[0]; });
  EXPECT_NEAR(bilap::interp(fx, {0.3, 0.0, 0.2}), 0.3, 1e-14);
  const auto fc = bilap::ScalarField::from_function(g, [](const Point&) { return 2.5; });
  for (const Point& z : {Point{0.1, 0, 0.7}, Point{-0.6, 0, 0.05}, Point{0.0, 0, 0.0}}) {
    EXPECT_NEAR(bilap::interp(fc, z), 2.5, 1e-14);
  }
  const auto faff = bilap::ScalarField::from_function(g, [](const Point& z) { return 1.0 + 2.0 * z[0] - 3.0 * z[2] + z[0] * z[2]; });
  EXPECT_NEAR(bilap::interp(faff, {0.33, 0, 0.41}), 1.0 + 0.66 - 1.23 + 0.33 * 0.41, 1e-13);
}

TEST(Interp, QuadraticOnCoarseGrid) {
  const auto g = bilap::build_grid(1, 0.5);
  const auto f = bilap::ScalarField::from_function(g, [](const Point& z) { return z[0] * z[0]; });
  // Average of the nodal values 0 and 0.25 at x = 0 and x = 0.5.
  EXPECT_NEAR(bilap::interp(f, {0.25, 0, 0}), 0.125, 1e-15);
}

TEST(Interp, OutsideCoverageThrows) {
  const auto g = bilap::build_grid(1, 0.125);
  const auto f = bilap::ScalarField::from_function(g, [](const Point& z) { return z[0]; });
  EXPECT_THROW(bilap::interp(f, {0.95, 0, 0.95}), bilap::DomainError);
  EXPECT_THROW(bilap::interp(f, {1.5, 0, 0.0}), bilap::DomainError);
}

TEST(Interp, EvenReflectionIsExact) {
  const auto g = bilap::build_grid(1, 1.0 / 16);
  const auto f = bilap::ScalarField::from_function(g, [](const Point& z) { return std::sin(3 * z[0]) + z[2] * z[2] * z[0]; });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-0.6, 0.6);
  for (int k = 0; k < 200; ++k) {
    const Point z{uni(rng), 0.0, std::abs(uni(rng))};
    EXPECT_EQ(bilap::interp(f, bilap::mirror(z)), bilap::interp(f, z));
  }
}

TEST(Interp, SecondOrderConvergence) {
  auto fn = [](const Point& z) { return std::sin(z[0]) * std::cosh(z[2]); };
  std::vector<double> errs;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto g = bilap::build_grid(1, h);
    const auto f = bilap::ScalarField::from_function(g, fn);
    double err = 0.0;
    for (int k = 0; k < 400; ++k) {
      const double th = pi * (k + 0.37) / 400.0;
      const double r = 0.1 + 0.6 * ((k * 7919) % 400) / 400.0;
      const Point z{r * std::cos(th), 0.0, r * std::sin(th)};
      err = std::max(err, std::abs(bilap::interp(f, z) - fn(z)));
    }
    errs.push_back(err);
  }
  for (std::size_t k = 1; k < errs.size(); ++k) {
    EXPECT_GT(std::log2(errs[k - 1] / errs[k]), 1.8) << "level " << k;
  }
}

TEST(Quadrature, MeasuresAreExact) {
  const auto g = bilap::build_grid(1, 1.0 / 16);
  const auto q = bilap::sphere_quadrature(*g, {0, 0, 0}, 0.5, 128);
  auto one = [](const Point&) { return 1.0; };
  EXPECT_NEAR(bilap::integrate(q.surface, one), 0.5 * pi, 1e-6);
  EXPECT_NEAR(bilap::integrate(q.solid, one), pi / 8.0, 1e-5);
  EXPECT_NEAR(bilap::integrate(q.thin, one), 1.0, 1e-6);
  for (const auto* set : {&q.surface, &q.solid, &q.thin}) {
    for (const auto& node : *set) EXPECT_GT(node.w, 0.0);
  }
}

TEST(Quadrature, ThreeDimensionalMeasures) {
  const auto q = bilap::make_quadrature(2, {0.1, -0.1, 0.0}, 0.4, 64);
  auto one = [](const Point&) { return 1.0; };
  const double r = 0.4;
  EXPECT_NEAR(bilap::integrate(q.surface, one) / (2 * pi * r * r), 1.0, 1e-6);
  EXPECT_NEAR(bilap::integrate(q.solid, one) / (2.0 / 3.0 * pi * r * r * r), 1.0, 1e-6);
  EXPECT_NEAR(bilap::integrate(q.thin, one) / (pi * r * r), 1.0, 1e-6);
}

TEST(Quadrature, CosineIntegratesToZeroOnHalfCircle) {
  const auto q = bilap::make_quadrature(1, {0, 0, 0}, 1.0, 64);
  EXPECT_NEAR(bilap::integrate(q.surface, [](const Point& z) { return z[0]; }), 0.0, 1e-6);
}

TEST(Quadrature, QuadraticsMatchReferenceIntegrals) {
  const double r = 0.45;
  const Point c{0.2, 0, 0};
  const auto q = bilap::make_quadrature(1, c, r, 256);
  // Degree <= 2 polynomials in the local polar coordinates, against adaptive Gauss-Kronrod.
  const std::vector<std::function<double(double, double)>> polys = {
      [](double, double) { return 1.0; },
      [](double rho, double th) { return rho * std::cos(th); },
      [](double rho, double th) { return 1.0 + 2 * rho * std::sin(th) + rho * rho * std::cos(th) * std::sin(th); },
      [](double rho, double th) { return std::pow(rho * std::cos(th), 2) - 3 * std::pow(rho * std::sin(th), 2); },
  };
  for (const auto& p : polys) {
    auto at = [&](const Point& z) {
      const Point d = z - c;
      return p(bilap::norm(d), std::atan2(d[2], d[0]));
    };
    const double ref_s = bilap::oracle::reference_surface(p, r);
    const double ref_v = bilap::oracle::reference_solid(p, r);
    EXPECT_NEAR(bilap::integrate(q.surface, at), ref_s, 1e-4 * std::max(1e-3, std::abs(ref_s)));
    EXPECT_NEAR(bilap::integrate(q.solid, at), ref_v, 1e-4 * std::max(1e-3, std::abs(ref_v)));
  }
}

TEST(Quadrature, Preconditions) {
  const auto g = bilap::build_grid(1, 1.0 / 16);
  EXPECT_THROW(bilap::sphere_quadrature(*g, {0.5, 0, 0}, 0.6, 128), bilap::DomainError);
  EXPECT_THROW(bilap::sphere_quadrature(*g, {0.0, 0, 0}, 0.2, 128), bilap::ConfigError);
  EXPECT_THROW(bilap::sphere_quadrature(*g, {0.0, 0, 0}, 0.5, 32), bilap::ConfigError);
  EXPECT_THROW(bilap::sphere_quadrature(*g, {0.0, 0, 0.1}, 0.5, 128), bilap::ConfigError);
}

}  // namespace
