#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"

namespace bilap {

/// Boundary datum g. Every family is defined on the whole half ball and is even in y
/// (so g_y = 0 on the thin space):
///   zero
///   harmonic:deg=k,coef=c,shift=s     g = c Re((x1 + i y)^k) + s
///   trig:freq=w,amp=a,phase=b         g = a sin(w x1 + b) cosh(w y)
///   tabulated:v0;v1;...;vK            values at angles theta_j = j pi / K on the unit
///                                     half circle (n = 1), linear in theta, extended
///                                     0-homogeneously (radial projection)
class BoundaryDatum {
 public:
  enum class Family { Zero, Harmonic, Trig, Tabulated };

  BoundaryDatum() = default;

  static BoundaryDatum zero() { return {}; }

  static BoundaryDatum harmonic(int degree, double coef = 1.0, double shift = 0.0) {
    if (degree < 0) throw ConfigError("g: harmonic degree must be >= 0");
    BoundaryDatum g;
    g.family_ = Family::Harmonic;
    g.degree_ = degree;
    g.a_ = coef;
    g.b_ = shift;
    return g;
  }

  static BoundaryDatum trig(double freq, double amp = 1.0, double phase = 0.0) {
    BoundaryDatum g;
    g.family_ = Family::Trig;
    g.freq_ = freq;
    g.a_ = amp;
    g.b_ = phase;
    return g;
  }

  static BoundaryDatum tabulated(std::vector<double> values) {
    if (values.size() < 2) throw ConfigError("g: tabulated datum needs at least two values");
    BoundaryDatum g;
    g.family_ = Family::Tabulated;
    g.table_ = std::move(values);
    return g;
  }

  /// Parses the textual forms documented on the class.
  static BoundaryDatum parse(std::string_view text) {
    const std::string s = trim(text);
    const auto colon = s.find(':');
    const std::string head = trim(s.substr(0, colon));
    const std::string body = colon == std::string::npos ? std::string() : s.substr(colon + 1);
    if (head == "zero") return zero();
    if (head == "tabulated") {
      std::vector<double> vals;
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ';')) vals.push_back(to_double(item, "g"));
      return tabulated(std::move(vals));
    }
    if (head != "harmonic" && head != "trig") throw ConfigError("g: unknown family '" + head + "'");
    double deg = 1.0, coef = 1.0, shift = 0.0, freq = 1.0, amp = 1.0, phase = 0.0;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("g: expected key=value, got '" + item + "'");
      const std::string k = trim(item.substr(0, eq));
      const double v = to_double(item.substr(eq + 1), "g");
      if (head == "harmonic" && k == "deg") deg = v;
      else if (head == "harmonic" && k == "coef") coef = v;
      else if (head == "harmonic" && k == "shift") shift = v;
      else if (head == "trig" && k == "freq") freq = v;
      else if (head == "trig" && k == "amp") amp = v;
      else if (head == "trig" && k == "phase") phase = v;
      else throw ConfigError("g: unknown parameter '" + k + "' for family " + head);
    }
    if (head == "harmonic") {
      if (deg < 0 || std::floor(deg) != deg) throw ConfigError("g: harmonic deg must be a nonnegative integer");
      return harmonic(static_cast<int>(deg), coef, shift);
    }
    return trig(freq, amp, phase);
  }

  Family family() const noexcept { return family_; }

  double operator()(const Point& z) const {
    switch (family_) {
      case Family::Zero: return 0.0;
      case Family::Harmonic: {
        const std::complex<double> w(z[0], z[kY]);
        return a_ * std::pow(w, degree_).real() + b_;
      }
      case Family::Trig: return a_ * std::sin(freq_ * z[0] + b_) * std::cosh(freq_ * z[kY]);
      case Family::Tabulated: {
        const double r = norm(z);
        if (r == 0.0) return 0.5 * (table_.front() + table_.back());
        const double th = std::atan2(std::abs(z[kY]), z[0]);
        const double t = th / std::numbers::pi * static_cast<double>(table_.size() - 1);
        const auto j = std::min(static_cast<std::size_t>(t), table_.size() - 2);
        const double f = t - static_cast<double>(j);
        return (1.0 - f) * table_[j] + f * table_[j + 1];
      }
    }
    return 0.0;
  }

  /// Whether g(-x1, x', y) = -g(x1, x', y).
  bool odd_in_x1() const {
    switch (family_) {
      case Family::Zero: return true;
      case Family::Harmonic: return degree_ % 2 == 1 && b_ == 0.0;
      case Family::Trig: return std::abs(std::sin(b_)) < 1e-15;
      case Family::Tabulated: {
        for (std::size_t j = 0; j < table_.size(); ++j) {
          if (table_[j] != -table_[table_.size() - 1 - j]) return false;
        }
        return true;
      }
    }
    return false;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
      case Family::Zero: os << "zero"; break;
      case Family::Harmonic: os << "harmonic:deg=" << degree_ << ",coef=" << a_ << ",shift=" << b_; break;
      case Family::Trig: os << "trig:freq=" << freq_ << ",amp=" << a_ << ",phase=" << b_; break;
      case Family::Tabulated:
        os << "tabulated:";
        for (std::size_t j = 0; j < table_.size(); ++j) os << (j ? ";" : "") << table_[j];
        break;
    }
    return os.str();
  }

 private:
  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
  }

  static double to_double(const std::string& s, const std::string& key) {
    try {
      std::size_t pos = 0;
      const std::string t = trim(s);
      const double v = std::stod(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse number '" + s + "'");
    }
  }

  Family family_ = Family::Zero;
  int degree_ = 0;
  double a_ = 0.0;
  double b_ = 0.0;
  double freq_ = 1.0;
  std::vector<double> table_;
};

enum class Preconditioner { Jacobi, Cholesky };

/// Full problem configuration.
struct ProblemSpec {
  int n = 1;
  double p = 2.0;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
  BoundaryDatum g;
  double h = 1.0 / 16.0;

  // Newton: stop when sup|grad J| <= tol_grad_rel * (1 + |J|).
  double tol_grad_rel = 1e-8;
  int max_iter = 200;
  double cg_tol = 1e-10;
  Preconditioner preconditioner = Preconditioner::Cholesky;

  /// Integrability exponent of the admissible class, recorded only.
  double q() const noexcept { return std::max(2.0, p); }

  /// Throws ConfigError naming the offending field.
  void validate() const {
    if (n != 1 && n != 2) throw ConfigError("n: thin dimension must be 1 or 2");
    if (!(p > 1.0)) throw ConfigError("p: exponent must satisfy p > 1");
    if (!(lambda_plus > 0.0)) throw ConfigError("lambda_plus: must be > 0");
    if (!(lambda_minus > 0.0)) throw ConfigError("lambda_minus: must be > 0");
    const double inv = 1.0 / h;
    if (!(h > 0.0) || std::abs(inv - std::round(inv)) > 1e-9 * inv) {
      throw ConfigError("h: spacing must divide 1 (1/h integer)");
    }
    if (!(tol_grad_rel > 0.0)) throw ConfigError("tol_grad: must be > 0");
    if (max_iter < 1) throw ConfigError("max_iter: must be >= 1");
  }

  /// Diagnostics (frequency, blow-ups) are only meaningful for p = 2 or p >= 3.
  bool diagnostics_admissible() const noexcept { return p == 2.0 || p >= 3.0; }
};

/// Thin reaction  lambda_-(t^-)^{p-1} - lambda_+(t^+)^{p-1}.
inline double thin_reaction(double t, const ProblemSpec& spec) {
  if (t > 0.0) return -spec.lambda_plus * std::pow(t, spec.p - 1.0);
  if (t < 0.0) return spec.lambda_minus * std::pow(-t, spec.p - 1.0);
  return 0.0;
}

/// Derivative of thin_reaction: -(p-1)(lambda_-(t^-)^{p-2} + lambda_+(t^+)^{p-2}).
/// For p = 2 the kink at 0 is resolved by choosing 0 there.
inline double thin_reaction_slope(double t, const ProblemSpec& spec) {
  if (!spec.diagnostics_admissible()) {
    throw ConfigError("p: reaction slope requires p = 2 or p >= 3");
  }
  const double e = spec.p - 1.0;
  if (t > 0.0) return -e * spec.lambda_plus * std::pow(t, spec.p - 2.0);
  if (t < 0.0) return -e * spec.lambda_minus * std::pow(-t, spec.p - 2.0);
  return 0.0;
}

/// Thin penalty density (2/p)(lambda_-(t^-)^p + lambda_+(t^+)^p).
inline double thin_penalty(double t, const ProblemSpec& spec) {
  const double lam = t > 0.0 ? spec.lambda_plus : spec.lambda_minus;
  return 2.0 / spec.p * lam * std::pow(std::abs(t), spec.p);
}

}  // namespace bilap
