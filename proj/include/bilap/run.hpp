#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bilap/analysis.hpp"
#include "bilap/config.hpp"
#include "bilap/solver.hpp"

namespace bilap {

/// How far a run goes past the solve.
enum class Stage { Solve, Diagnose, Blowup };

/// Output root from BILAP_OUTPUT_ROOT, or ./bilap-out.
inline std::filesystem::path output_root() {
  const char* env = std::getenv("BILAP_OUTPUT_ROOT");
  return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("bilap-out");
}

struct RunArtifacts {
  std::filesystem::path dir;
  std::string hash;
  SolveResult result;
  std::vector<PointReport> points;
  std::vector<CenterReport> centers;
  nlohmann::ordered_json summary;
};

namespace detail {

inline std::string center_label(const Point& z, int n) {
  std::string s;
  for (int a = 0; a < n; ++a) {
    char buf[32];
    const double x = z[axis_slot(n, a)];
    std::snprintf(buf, sizeof buf, "%+.6f", std::abs(x) < 5e-7 ? 0.0 : x);
    s += (a ? "_" : "") + std::string(buf);
  }
  return s;
}

inline std::string opt_num(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }


inline nlohmann::ordered_json thin_coords(const Point& z, int n) {
  auto a = nlohmann::ordered_json::array();
  for (int k = 0; k < n; ++k) a.push_back(z[axis_slot(n, k)]);
  return a;
}

inline nlohmann::ordered_json center_json(const CenterReport& c, int n) {
  nlohmann::ordered_json j;
  j["x"] = thin_coords(c.center, n);
  j["u"] = c.u_value;
  j["v"] = c.v_value;
  j["radii"] = {{"min", c.radii.empty() ? 0.0 : c.radii.front()},
                {"max", c.radii.empty() ? 0.0 : c.radii.back()},
                {"count", c.radii.size()}};
  if (c.mu) {
    j["mu_hat"] = c.mu->mu_hat;
    j["mu_int"] = c.mu->mu_int ? nlohmann::ordered_json(*c.mu->mu_int) : nlohmann::ordered_json(nullptr);
  } else {
    j["mu_hat"] = nullptr;
    j["mu_int"] = nullptr;
    j["mu_error"] = c.mu_error;
  }
  if (c.radii.empty()) return j;
  j["almgren_C"] = c.almgren.C;
  j["almgren_within"] = c.almgren.within;
  j["growth_slope"] = c.growth.degenerate ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.growth.slope);
  j["best_fit_degree"] = c.best_degree ? nlohmann::ordered_json(*c.best_degree) : nlohmann::ordered_json(nullptr);
  if (c.blowup) {
    j["blowup"] = {{"p", c.blowup->p_mu.coefficients()},
                   {"q", c.blowup->q_mu.coefficients()},
                   {"p_poly", c.blowup->p_mu.describe()},
                   {"q_poly", c.blowup->q_mu.describe()},
                   {"fit_residual", c.blowup->residual.front()},
                   {"residual_curve", c.blowup->residual}};
  } else if (!c.blowup_error.empty()) {
    j["blowup_error"] = c.blowup_error;
  }
  if (c.monneau) j["monneau_C"] = c.monneau->C;
  if (c.nondegeneracy) {
    j["nondegeneracy"] = {{"c_min", c.nondegeneracy->c_min},
                          {"c_max", c.nondegeneracy->c_max},
                          {"degenerate", c.nondegeneracy->degenerate}};
  }
  return j;
}

/// Opens a CSV and writes the config hash comment and the header row.
inline std::ofstream open_csv(const std::filesystem::path& path, const std::string& hash, const std::string& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output_dir: cannot write " + path.string());
  out << "# config_hash=" << hash << "\n" << header << "\n";
  return out;
}

inline void write_fields(const std::filesystem::path& path, const std::string& hash, const SolveResult& res) {
  const HalfBallGrid& g = res.grid();
  const int n = g.dim();
  auto out = open_csv(path, hash, n == 1 ? "x,y,u,v" : "x1,x2,y,u,v");
  for (std::size_t id = 0; id < g.size(); ++id) {
    const Point z = g.position(id);
    for (int a = 0; a <= n; ++a) out << fmt(z[axis_slot(n, a)]) << ",";
    out << fmt(res.u[id]) << "," << fmt(res.v[id]) << "\n";
  }
}

inline void write_profile(const std::filesystem::path& path, const std::string& hash, const RadialProfile& prof) {
  auto out = open_csv(path, hash, "r,H,D,D0,B,N,N0,phi,W,M");
  for (const auto& r : prof.rows) {
    out << fmt(r.r) << "," << fmt(r.H) << "," << fmt(r.D) << "," << fmt(r.D0) << "," << fmt(r.B) << "," << fmt(r.N)
        << "," << fmt(r.N0) << "," << fmt(r.phi) << "," << opt_num(r.W) << "," << opt_num(r.M) << "\n";
  }
}

inline void write_gamma(const std::filesystem::path& path, const std::string& hash, const std::vector<PointReport>& pts,
                        int n) {
  auto out = open_csv(path, hash, n == 1 ? "x,side,class,mu_hat,mu_int,d,fit_residual"
                                         : "x1,x2,side,class,mu_hat,mu_int,d,fit_residual");
  for (const auto& pr : pts) {
    const FreeBoundaryPoint& p = pr.point;
    for (int a = 0; a < n; ++a) out << fmt(p.location[axis_slot(n, a)]) << ",";
    out << p.side() << "," << (p.classification ? to_string(*p.classification) : "") << "," << opt_num(p.mu_hat) << ","
        << (p.mu_int ? std::to_string(*p.mu_int) : "") << "," << (p.stratum_dim ? std::to_string(*p.stratum_dim) : "")
        << "," << opt_num(p.fit_residual) << "\n";
  }
}

}  // namespace detail

/// Solve, then analyse according to the stage, then write the artifact directory under root.
inline RunArtifacts run(const RunConfig& cfg, Stage stage, const std::filesystem::path& root = output_root()) {
  validate(cfg);
  RunArtifacts art;
  art.hash = config_hash(cfg);
  art.dir = root / (cfg.output_dir.empty() ? "run-" + art.hash : cfg.output_dir);

  const ProblemSpec& spec = cfg.spec;
  const int n = spec.n;
  art.result = minimize(spec);
  const double weak = weak_residual(art.result, spec, cfg.weak_trials, static_cast<unsigned>(cfg.seed));

  AnalysisOptions aopt;
  aopt.samples = cfg.samples;
  aopt.radii_min = cfg.radii_min;
  aopt.blowup = stage == Stage::Blowup || cfg.blowup;
  const bool diagnose = stage != Stage::Solve;
  const bool admissible = spec.diagnostics_admissible();

  if (diagnose && admissible) {
    if (cfg.centers_from_gamma) art.points = analyze_free_boundary(art.result, spec, aopt);
    const FieldPair fp = solution_pair(art.result, spec);
    for (const Point& z : cfg.centers) {
      try {
        art.centers.push_back(analyze_center(fp, z, aopt));
      } catch (const DiagnosticError& e) {
        CenterReport c;
        c.center = z;
        c.mu_error = e.what();
        art.centers.push_back(c);
      }
    }
  } else {
    for (FreeBoundaryPoint p : extract_gamma(art.result.u)) {
      classify_point(p, art.result.u, art.result.v);
      art.points.push_back({p, {}});
    }
  }

  nlohmann::ordered_json& s = art.summary;
  s["config_hash"] = art.hash;
  s["stage"] = stage == Stage::Solve ? "solve" : stage == Stage::Diagnose ? "diagnose" : "blowup";
  s["config"] = effective_config(cfg);
  s["solve"] = {{"energy", art.result.energy},
                {"initial_energy", art.result.initial_energy},
                {"gradient_norm", art.result.gradient_norm},
                {"iterations", art.result.iterations},
                {"linear_iterations", art.result.linear_iterations},
                {"converged", art.result.converged},
                {"nodes", art.result.grid().size()},
                {"weak_residual", weak}};
  if (diagnose && !admissible) s["diagnostics_skipped"] = "frequency diagnostics need p = 2 or p >= 3";
  if (cfg.subharmonicity) {
    const auto sub = subharmonicity_check(art.result);
    s["subharmonicity"] = {{"max_excess", sub.max_excess},
                           {"checked", sub.checked},
                           {"violations", sub.violations},
                           {"worst_field", sub.worst_field},
                           {"worst_point", detail::thin_coords(sub.worst_point, n)},
                           {"worst_height", sub.worst_point[kY]}};
  }
  auto pts = nlohmann::ordered_json::array();
  std::size_t regular = 0, singular = 0;
  for (const auto& pr : art.points) {
    const FreeBoundaryPoint& p = pr.point;
    nlohmann::ordered_json j;
    j["x"] = detail::thin_coords(p.location, n);
    j["side"] = p.side();
    j["class"] = p.classification ? to_string(*p.classification) : "";
    (p.classification == PointClass::Regular ? regular : singular)++;
    j["grad_u"] = p.grad_u;
    j["grad_v"] = p.grad_v;
    j["threshold"] = p.threshold;
    if (!p.tag.empty()) j["tag"] = p.tag;
    j["d"] = p.stratum_dim ? nlohmann::ordered_json(*p.stratum_dim) : nlohmann::ordered_json(nullptr);
    if (diagnose && admissible) j["analysis"] = detail::center_json(pr.analysis, n);
    pts.push_back(std::move(j));
  }
  s["free_boundary"] = {{"count", art.points.size()}, {"regular", regular}, {"singular", singular}, {"points", pts}};
  auto cs = nlohmann::ordered_json::array();
  for (const auto& c : art.centers) cs.push_back(detail::center_json(c, n));
  s["centers"] = cs;

  std::filesystem::create_directories(art.dir);
  {
    std::ofstream echo(art.dir / "config.txt", std::ios::binary);
    echo << "# config_hash=" << art.hash << "\n" << effective_config(cfg);
  }
  {
    std::ofstream js(art.dir / "summary.json", std::ios::binary);
    js << s.dump(2) << "\n";
  }
  detail::write_fields(art.dir / "fields.csv", art.hash, art.result);
  detail::write_gamma(art.dir / "gamma.csv", art.hash, art.points, n);
  std::set<std::string> written;
  auto profile = [&](const CenterReport& c) {
    if (c.profile.rows.empty()) return;
    const std::string label = detail::center_label(c.center, n);
    if (!written.insert(label).second) return;
    detail::write_profile(art.dir / ("profile_" + label + ".csv"), art.hash, c.profile);
  };
  for (const auto& pr : art.points) profile(pr.analysis);
  for (const auto& c : art.centers) profile(c);
  return art;
}

}  // namespace bilap
