#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"

namespace bilap {

using Rational = boost::rational<std::int64_t>;
/// Exponents of (x1, x2, y), in the same slot order as Point.
using Exponent = std::array<int, 3>;

/// Polynomial in (x1, x2, y) with exact rational coefficients.
class RationalPoly {
 public:
  std::map<Exponent, Rational> terms;

  void add(const Exponent& e, const Rational& c) {
    if (c.numerator() == 0) return;
    auto [it, inserted] = terms.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.numerator() == 0) terms.erase(it);
    }
  }

  bool is_zero() const { return terms.empty(); }

  RationalPoly derivative(int slot) const {
    RationalPoly out;
    for (const auto& [e, c] : terms) {
      if (e[slot] == 0) continue;
      Exponent d = e;
      --d[slot];
      out.add(d, c * Rational(e[slot]));
    }
    return out;
  }

  RationalPoly laplacian() const {
    RationalPoly out;
    for (int s = 0; s < 3; ++s) {
      for (const auto& [e, c] : derivative(s).derivative(s).terms) out.add(e, c);
    }
    return out;
  }

  /// Substitutes y = 0.
  RationalPoly trace() const {
    RationalPoly out;
    for (const auto& [e, c] : terms) {
      if (e[kY] == 0) out.add(e, c);
    }
    return out;
  }

  double operator()(const Point& z) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms) {
      acc += boost::rational_cast<double>(c) * std::pow(z[0], e[0]) * std::pow(z[1], e[1]) * std::pow(z[2], e[2]);
    }
    return acc;
  }
};

namespace detail {

inline Rational factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

/// Even-in-y harmonic extension of a thin polynomial P(x):
/// sum_j (-1)^j y^{2j} / (2j)! Delta_x^j P.
inline RationalPoly even_harmonic_extension(const RationalPoly& thin) {
  RationalPoly out;
  RationalPoly lap = thin;
  for (int j = 0; !lap.is_zero(); ++j) {
    const Rational scale = Rational(j % 2 == 0 ? 1 : -1) / factorial(2 * j);
    for (const auto& [e, c] : lap.terms) {
      Exponent ey = e;
      ey[kY] += 2 * j;
      out.add(ey, c * scale);
    }
    RationalPoly next;
    for (int s = 0; s < 2; ++s) {
      for (const auto& [e, c] : lap.derivative(s).derivative(s).terms) next.add(e, c);
    }
    lap = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Basis of harmonic polynomials homogeneous of degree mu and even in y. Element b is the
/// even harmonic extension of the thin monomial x1^(mu-b) x2^b; for n = 1 the single element
/// is Re((x1 + i y)^mu).
inline std::vector<RationalPoly> harmonic_basis(int n, int degree) {
  if (n != 1 && n != 2) throw ConfigError("harmonic basis: n must be 1 or 2");
  if (degree < 0) throw ConfigError("harmonic basis: degree must be nonnegative");
  std::vector<RationalPoly> basis;
  const int count = n == 1 ? 1 : degree + 1;
  for (int b = 0; b < count; ++b) {
    RationalPoly thin;
    thin.add({degree - b, b, 0}, Rational(1));
    basis.push_back(detail::even_harmonic_extension(thin));
  }
  return basis;
}

/// A homogeneous harmonic polynomial, even in y, stored by its coefficients in harmonic_basis.
class HomogeneousHarmonicPoly {
 public:
  HomogeneousHarmonicPoly() = default;
  HomogeneousHarmonicPoly(int n, int degree, std::vector<double> coefficients)
      : n_(n), degree_(degree), coef_(std::move(coefficients)), basis_(harmonic_basis(n, degree)) {
    if (coef_.size() != basis_.size()) throw ConfigError("harmonic polynomial: coefficient count does not match basis");
  }

  static HomogeneousHarmonicPoly zero(int n, int degree) {
    return HomogeneousHarmonicPoly(n, degree, std::vector<double>(harmonic_basis(n, degree).size(), 0.0));
  }

  int dim() const { return n_; }
  int degree() const { return degree_; }
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<RationalPoly>& basis() const { return basis_; }

  bool is_zero() const {
    for (double c : coef_) {
      if (c != 0.0) return false;
    }
    return true;
  }

  double operator()(const Point& z) const {
    double acc = 0.0;
    for (std::size_t b = 0; b < coef_.size(); ++b) {
      if (coef_[b] != 0.0) acc += coef_[b] * basis_[b](z);
    }
    return acc;
  }

  /// Exact check on the rational basis: every basis element has zero Laplacian.
  bool harmonic() const {
    for (const auto& p : basis_) {
      if (!p.laplacian().is_zero()) return false;
    }
    return true;
  }

  /// Thin-space gradient of the trace as an n x (number of degree mu-1 monomials) matrix
  /// of exact-in-basis coefficients: row a holds d/dx_a P(x, 0).
  std::vector<std::vector<double>> thin_gradient_coefficients() const {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_));
    if (degree_ == 0) {
      for (auto& r : rows) r.assign(1, 0.0);
      return rows;
    }
    const int cols = n_ == 1 ? 1 : degree_;
    for (int a = 0; a < n_; ++a) {
      std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
      for (std::size_t b = 0; b < coef_.size(); ++b) {
        for (const auto& [e, c] : basis_[b].trace().derivative(a).terms) {
          row[static_cast<std::size_t>(e[1])] += coef_[b] * boost::rational_cast<double>(c);
        }
      }
      rows[static_cast<std::size_t>(a)] = std::move(row);
    }
    return rows;
  }

  std::string describe() const {
    std::string s = "deg " + std::to_string(degree_) + " [";
    for (std::size_t b = 0; b < coef_.size(); ++b) s += (b ? ", " : "") + std::to_string(coef_[b]);
    return s + "]";
  }

 private:
  int n_ = 1;
  int degree_ = 0;
  std::vector<double> coef_;
  std::vector<RationalPoly> basis_;
};

}  // namespace bilap
