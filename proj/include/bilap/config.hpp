#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"
#include "bilap/problem.hpp"

namespace bilap {

/// A problem plus everything a run needs around it.
struct RunConfig {
  ProblemSpec spec;
  bool centers_from_gamma = true;  ///< diagnose at every extracted free boundary point
  std::vector<Point> centers;      ///< extra centers on the thin space
  double radii_min = 0.0;          ///< smallest profile radius; 0 means 4h
  int samples = 256;               ///< angular quadrature count m
  int weak_trials = 20;
  std::uint64_t seed = 12345;
  std::string output_dir;  ///< relative to the output root; empty means run-<hash>
  bool blowup = true;      ///< fit blow-up polynomials at points with integer frequency
  bool subharmonicity = false;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(t.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("");
      const std::string rest = t.substr(slash + 1);
      const double b = std::stod(rest, &used);
      if (used != rest.size() || b == 0.0) throw std::invalid_argument("");
      return a / b;
    }
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse number '" + t + "'");
  }
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": expected an integer, got '" + trim(text) + "'");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + t + "'");
}

/// "gamma", or centers separated by ';' with thin coordinates separated by ','.
inline void parse_centers(const std::string& text, int n, RunConfig& cfg) {
  cfg.centers.clear();
  cfg.centers_from_gamma = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "gamma") {
      cfg.centers_from_gamma = true;
      continue;
    }
    std::vector<double> coords;
    std::stringstream cs(item);
    std::string c;
    while (std::getline(cs, c, ',')) coords.push_back(parse_number("centers", c));
    if (static_cast<int>(coords.size()) != n) {
      throw ConfigError("centers: '" + item + "' needs " + std::to_string(n) + " thin coordinate(s)");
    }
    Point z{0, 0, 0};
    for (int a = 0; a < n; ++a) z[axis_slot(n, a)] = coords[static_cast<std::size_t>(a)];
    cfg.centers.push_back(z);
  }
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Checks that do not need a solve.
inline void validate(const RunConfig& cfg) {
  cfg.spec.validate();
  for (const Point& z : cfg.centers) {
    if (!(norm(z) < 1.0)) throw ConfigError("centers: center at |x| = " + detail::fmt(norm(z)) + " lies outside the unit thin ball");
  }
  if (cfg.radii_min < 0.0) throw ConfigError("radii_min: must be >= 0");
  if (cfg.samples < 64) throw ConfigError("samples: quadrature count must be >= 64");
  if (cfg.weak_trials < 10) throw ConfigError("weak_trials: must be >= 10");
  if (cfg.output_dir.find("..") != std::string::npos) throw ConfigError("output_dir: must not contain '..'");
}

/// Parses "key = value" lines; '#' starts a comment. Unknown or repeated keys are errors.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::string centers_text;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (!seen.emplace(key, val).second) throw ConfigError(key + ": given more than once");
  }

  ProblemSpec& s = cfg.spec;
  for (const auto& [key, val] : seen) {
    if (key == "n") {
      s.n = detail::parse_int(key, val);
    } else if (key == "p") {
      s.p = detail::parse_number(key, val);
    } else if (key == "lambda_plus") {
      s.lambda_plus = detail::parse_number(key, val);
    } else if (key == "lambda_minus") {
      s.lambda_minus = detail::parse_number(key, val);
    } else if (key == "h") {
      s.h = detail::parse_number(key, val);
    } else if (key == "g") {
      s.g = BoundaryDatum::parse(val);
    } else if (key == "tol_grad") {
      s.tol_grad_rel = detail::parse_number(key, val);
    } else if (key == "max_iter") {
      s.max_iter = detail::parse_int(key, val);
    } else if (key == "cg_tol") {
      s.cg_tol = detail::parse_number(key, val);
    } else if (key == "preconditioner") {
      if (val == "cholesky") {
        s.preconditioner = Preconditioner::Cholesky;
      } else if (val == "jacobi") {
        s.preconditioner = Preconditioner::Jacobi;
      } else {
        throw ConfigError("preconditioner: expected cholesky or jacobi, got '" + val + "'");
      }
    } else if (key == "centers") {
      centers_text = val;
    } else if (key == "radii_min") {
      cfg.radii_min = detail::parse_number(key, val);
    } else if (key == "samples") {
      cfg.samples = detail::parse_int(key, val);
    } else if (key == "weak_trials") {
      cfg.weak_trials = detail::parse_int(key, val);
    } else if (key == "seed") {
      const int v = detail::parse_int(key, val);
      if (v < 0) throw ConfigError("seed: must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "output_dir") {
      cfg.output_dir = val;
    } else if (key == "blowup") {
      cfg.blowup = detail::parse_bool(key, val);
    } else if (key == "subharmonicity") {
      cfg.subharmonicity = detail::parse_bool(key, val);
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  // centers depend on n, which may appear on any line
  if (!centers_text.empty()) detail::parse_centers(centers_text, s.n, cfg);
  validate(cfg);
  return cfg;
}

/// Canonical "key = value" text of every setting, defaults included, in a fixed order.
inline std::string effective_config(const RunConfig& cfg) {
  const ProblemSpec& s = cfg.spec;
  std::ostringstream o;
  o << "n = " << s.n << "\n";
  o << "p = " << detail::fmt(s.p) << "\n";
  o << "lambda_plus = " << detail::fmt(s.lambda_plus) << "\n";
  o << "lambda_minus = " << detail::fmt(s.lambda_minus) << "\n";
  o << "h = " << detail::fmt(s.h) << "\n";
  o << "g = " << s.g.describe() << "\n";
  o << "tol_grad = " << detail::fmt(s.tol_grad_rel) << "\n";
  o << "max_iter = " << s.max_iter << "\n";
  o << "cg_tol = " << detail::fmt(s.cg_tol) << "\n";
  o << "preconditioner = " << (s.preconditioner == Preconditioner::Cholesky ? "cholesky" : "jacobi") << "\n";
  o << "centers = ";
  bool first = true;
  if (cfg.centers_from_gamma) {
    o << "gamma";
    first = false;
  }
  for (const Point& z : cfg.centers) {
    o << (first ? "" : "; ");
    first = false;
    for (int a = 0; a < s.n; ++a) o << (a ? "," : "") << detail::fmt(z[axis_slot(s.n, a)]);
  }
  o << "\n";
  o << "radii_min = " << detail::fmt(cfg.radii_min) << "\n";
  o << "samples = " << cfg.samples << "\n";
  o << "weak_trials = " << cfg.weak_trials << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "output_dir = " << cfg.output_dir << "\n";
  o << "blowup = " << (cfg.blowup ? "true" : "false") << "\n";
  o << "subharmonicity = " << (cfg.subharmonicity ? "true" : "false") << "\n";
  return o.str();
}

/// 64-bit FNV-1a of the effective config, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : effective_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bilap
