#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bilap/acceptance.hpp"
#include "bilap/config.hpp"
#include "bilap/extension.hpp"
#include "bilap/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

bilap::RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bilap::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return bilap::parse_config(ss.str());
}

int run_stage(const std::string& path, bilap::Stage stage) {
  const auto art = bilap::run(load_config(path), stage);
  const auto& s = art.summary;
  std::cout << "artifacts: " << art.dir.string() << "\n";
  std::cout << "config_hash: " << art.hash << "\n";
  std::cout << "energy: " << s["solve"]["energy"].get<double>() << "  iterations: " << s["solve"]["iterations"].get<int>()
            << "  weak residual: " << s["solve"]["weak_residual"].get<double>() << "\n";
  std::cout << "free boundary points: " << art.points.size() << " (" << s["free_boundary"]["regular"].get<int>()
            << " regular, " << s["free_boundary"]["singular"].get<int>() << " singular)\n";
  for (const auto& p : art.points) {
    std::cout << "  x = " << bilap::detail::center_label(p.point.location, art.result.grid().dim()) << "  "
              << p.point.side() << "  " << (p.point.classification ? bilap::to_string(*p.point.classification) : "");
    if (p.point.mu_hat) std::cout << "  mu_hat = " << *p.point.mu_hat;
    if (p.point.mu_int) std::cout << "  mu = " << *p.point.mu_int;
    if (p.point.stratum_dim) std::cout << "  d = " << *p.point.stratum_dim;
    std::cout << "\n";
  }
  return art.result.converged ? kOk : kCheckFailed;
}

std::vector<int> parse_modes(const std::string& text) {
  std::vector<int> modes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int k = std::stoi(item, &used);
      if (used != item.size() || k < 1) throw std::invalid_argument("");
      modes.push_back(k);
    } catch (const std::exception&) {
      throw bilap::ConfigError("--modes: expected positive integers separated by commas, got '" + text + "'");
    }
  }
  if (modes.empty()) throw bilap::ConfigError("--modes: no modes given");
  return modes;
}

int extension_check(const std::string& modes_text, double height) {
  const auto modes = parse_modes(modes_text);
  bilap::FourierTrace trace;
  for (int k : modes) {
    if (static_cast<std::size_t>(k) >= trace.a.size()) trace.a.resize(static_cast<std::size_t>(k) + 1, 0.0);
    trace.a[static_cast<std::size_t>(k)] = 1.0;
  }
  const auto rep = bilap::dtn_compare(trace, height);
  bool pass = rep.spread <= 0.02;
  std::printf("%6s %12s %10s\n", "mode", "ratio", "status");
  for (std::size_t i = 0; i < rep.modes.size(); ++i) {
    const bool ok = std::abs(rep.ratio[i] - 2.0) <= 0.05 * 2.0;
    pass = pass && ok;
    std::printf("%6d %12.6f %10s\n", rep.modes[i], rep.ratio[i], ok ? "ok" : "off");
  }
  std::printf("calibrated constant %.6f, spread %.3g (target 2 +- 5%%, spread <= 2%%): %s\n", rep.calibrated, rep.spread,
              pass ? "PASS" : "FAIL");
  return pass ? kOk : kCheckFailed;
}

int verify(const std::string& level) {
  const auto lv = level == "quick" ? bilap::Level::Quick : bilap::Level::Full;
  std::printf("%-4s %-34s %-6s %s\n", "id", "check", "result", "measured / target");
  const auto rep = bilap::run_acceptance(lv, [](const bilap::CriterionResult& r) {
    std::printf("%-4d %-34s %-6s %s\n", r.id, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.measured.c_str());
    std::printf("%-4s %-34s %-6s target: %s\n", "", "", "", r.target.c_str());
    if (!r.note.empty()) std::printf("%-4s %-34s %-6s reason: %s\n", "", "", "", r.note.c_str());
    std::fflush(stdout);
  });
  std::size_t passed = 0;
  for (const auto& r : rep.rows) passed += r.pass ? 1 : 0;
  std::printf("%zu/%zu checks pass (%s)\n", passed, rep.rows.size(), level.c_str());
  return rep.all_pass() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-phase thin obstacle solver and diagnostics for the bi-Laplacian"};
  app.require_subcommand(1);
  app.footer("Artifacts go under $BILAP_OUTPUT_ROOT (default ./bilap-out).\nExit codes: 0 success, 1 check failure, 2 usage or config error.");

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "Solve and write fields, free boundary and summary");
  solve->add_option("config", config_path, "Config file (key = value lines)")->required();
  auto* diagnose = app.add_subcommand("diagnose", "Solve, then profile every center and free boundary point");
  diagnose->add_option("config", config_path, "Config file (key = value lines)")->required();
  auto* blowup = app.add_subcommand("blowup", "Diagnose and fit blow-up polynomials at integer frequencies");
  blowup->add_option("config", config_path, "Config file (key = value lines)")->required();

  std::string modes = "1,2,3";
  double height = 12.0;
  auto* ext = app.add_subcommand("extension-check", "Compare the strip extension's boundary flux with the fractional Laplacian");
  ext->add_option("--modes", modes, "Cosine modes with unit amplitude, comma separated")->capture_default_str();
  ext->add_option("--height", height, "Strip height Y")->capture_default_str();

  std::string level = "quick";
  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  ver->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (solve->parsed()) return run_stage(config_path, bilap::Stage::Solve);
    if (diagnose->parsed()) return run_stage(config_path, bilap::Stage::Diagnose);
    if (blowup->parsed()) return run_stage(config_path, bilap::Stage::Blowup);
    if (ext->parsed()) return extension_check(modes, height);
    if (ver->parsed()) return verify(level);
  } catch (const bilap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const bilap::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
