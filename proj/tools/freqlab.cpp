// freqlab: deterministic experiment runner for the gauge-frequency laboratory.
// Subcommands: identities | frequency | monotonicity | order | solve | report.
// Exit codes: 0 all-pass, 2 check failure, 3 hypothesis violation,
// 4 numerical degeneracy.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "freqlab/catalog.hpp"
#include "freqlab/config.hpp"
#include "freqlab/errors.hpp"
#include "freqlab/identities.hpp"
#include "freqlab/report.hpp"
#include "freqlab/solver.hpp"

namespace fl = freqlab;

namespace {

std::string sanitize(const std::string& id) {
  std::string s = id;
  for (char& c : s)
    if (c == '/' || c == '?' || c == '&' || c == '=' || c == ':') c = '_';
  return s;
}

int exit_code_for(const fl::Error& e) {
  switch (e.kind()) {
    case fl::ErrorKind::HypothesisViolation:
      return 3;
    case fl::ErrorKind::Degenerate:
      return 4;
    default:
      return 2;
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void emit(const std::string& dir, fl::ExperimentReport& report,
          std::map<std::string, double>& timing) {
  fl::write_report_json(dir, report);
  fl::write_timing_json(dir, timing);
  for (const fl::CheckResult& c : report.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " value="
              << fl::format_double(c.value)
              << " tol=" << fl::format_double(c.tolerance) << "\n";
}

int run_identities(const fl::ExperimentConfig& cfg, const std::string& out) {
  Timer timer;
  fl::ExperimentReport report;
  report.command = "identities";
  report.config_echo = cfg.echo();

  // Validate the raw algebra before building any geometry, so corrupted
  // structure constants are reported rather than masked by a gauge error.
  const fl::StratifiedAlgebra alg = fl::StratifiedAlgebra::from_id(cfg.geometry);
  const fl::ValidationReport vr = fl::validate_algebra(alg);
  std::vector<fl::IdentityResult> results;
  results.push_back({"validate_algebra", vr.ok() ? 0.0 : 1.0, 0.5, vr.ok()});
  if (!vr.ok()) {
    report.add_check("validate_algebra", false, 1.0, 0.5, vr.summary());
  } else {
    const fl::GaugeGeometry geom = fl::GaugeGeometry::from_algebra(alg);
    results = fl::run_identity_suite(geom, 100, cfg.seed);
    for (const auto& r : results) report.add_check(r.name, r.pass, r.worst, r.tol);
  }
  const std::string csv_path = out + "/identities.csv";
  fl::write_text_atomic(csv_path, fl::identities_csv(results));
  report.artifacts.push_back(csv_path);
  std::map<std::string, double> timing{{"total_s", timer.seconds()}};
  emit(out, report, timing);
  return report.all_pass() ? 0 : 2;
}

int run_frequency(const fl::ExperimentConfig& cfg, const std::string& out) {
  Timer timer;
  const fl::GaugeGeometry geom = fl::GaugeGeometry::from_id(cfg.geometry);
  if (cfg.entries.empty())
    fl::fail(fl::ErrorKind::Structural, "frequency needs catalog entries");
  fl::ExperimentReport report;
  report.command = "frequency";
  report.config_echo = cfg.echo();
  std::map<std::string, double> timing;
  for (const std::string& id : cfg.entries) {
    Timer et;
    const fl::CatalogEntry entry = fl::catalog_entry_from_id(geom, id);
    const double alpha = cfg.alpha_for(entry.K);
    const fl::FrequencyProfile p = fl::frequency_profile(
        geom, entry, cfg.r_grid(), alpha, cfg.quadrature(), cfg.dini());
    const std::string base = out + "/" + sanitize(id);
    fl::write_text_atomic(base + "_profile.csv", fl::profile_csv(p));
    fl::SvgSeries s{"N(r)", {}, {}};
    for (const auto& row : p.rows)
      if (row.N_defined) {
        s.x.push_back(row.r);
        s.y.push_back(row.N);
      }
    fl::write_text_atomic(base + "_N.svg",
                          fl::svg_plot("frequency " + id, "r", "N", {s}));
    report.artifacts.push_back(base + "_profile.csv");
    report.artifacts.push_back(base + "_N.svg");
    double worst_h = 0.0, worst_i = 0.0;
    for (const auto& row : p.rows) {
      if (row.Hp_residual >= 0.0) worst_h = std::max(worst_h, row.Hp_residual);
      if (row.Ip_residual >= 0.0) worst_i = std::max(worst_i, row.Ip_residual);
    }
    report.add_check("profile/" + id, true, 0.0, 0.0);
    report.metrics[sanitize(id)] = {{"alpha", alpha},
                                    {"K", entry.K},
                                    {"worst_Hp_residual", worst_h},
                                    {"worst_Ip_residual", worst_i}};
    timing[sanitize(id) + "_s"] = et.seconds();
  }
  timing["total_s"] = timer.seconds();
  emit(out, report, timing);
  return report.all_pass() ? 0 : 2;
}

int run_monotonicity(const fl::ExperimentConfig& cfg, const std::string& out) {
  Timer timer;
  const fl::GaugeGeometry geom = fl::GaugeGeometry::from_id(cfg.geometry);
  if (cfg.entries.empty())
    fl::fail(fl::ErrorKind::Structural, "monotonicity needs catalog entries");
  fl::ExperimentReport report;
  report.command = "monotonicity";
  report.config_echo = cfg.echo();
  std::map<std::string, double> timing;
  const fl::DiniModulus dini = cfg.dini();
  for (const std::string& id : cfg.entries) {
    Timer et;
    const fl::CatalogEntry entry = fl::catalog_entry_from_id(geom, id);
    const double K = entry.K;
    const double alpha = cfg.alpha_for(K);
    fl::FrequencyProfile p = fl::frequency_profile(
        geom, entry, cfg.r_grid(), alpha, cfg.quadrature(), dini);
    const auto grid = fl::default_cbar_grid(cfg.cbar_max_exp);
    const fl::MonotonicityReport fit = fl::fit_min_cbar(
        p, dini, K, grid, cfg.monotonicity_tol, cfg.allow_hypothesis_violation);
    report.add_check("cbar_fitted/" + id, fit.cbar_fitted.has_value(),
                     fit.cbar_fitted.value_or(-1.0),
                     std::ldexp(1.0, cfg.cbar_max_exp));
    if (fit.cbar_fitted) {
      const auto adj = fl::adjusted_frequency(p, dini, *fit.cbar_fitted, K,
                                              cfg.allow_hypothesis_violation);
      for (std::size_t i = 0; i < p.rows.size(); ++i)
        p.rows[i].adjusted = adj[i];
      const fl::TwoRadiusCheck two =
          fl::two_radius_check(p, dini, *fit.cbar_fitted, K);
      report.add_check("two_radius/" + id, two.pass, two.worst_margin, 0.0);
      const fl::FrequencyProfile pc = fl::coarse_profile(geom, p);
      const fl::MonotonicityReport fitc =
          fl::fit_min_cbar(pc, dini, K, grid, cfg.monotonicity_tol,
                           cfg.allow_hypothesis_violation);
      const bool stable =
          fitc.cbar_fitted &&
          std::abs(std::log2(*fitc.cbar_fitted) -
                   std::log2(*fit.cbar_fitted)) <= 1.0 + 1e-9;
      report.add_check("cbar_stability/" + id, stable,
                       fitc.cbar_fitted.value_or(-1.0), 0.0);
      report.metrics[sanitize(id)] = {
          {"cbar", *fit.cbar_fitted},
          {"cbar_coarse", fitc.cbar_fitted.value_or(-1.0)},
          {"c1_tilde", two.c1_tilde},
          {"c2_tilde", two.c2_tilde},
          {"K", K},
          {"alpha", alpha}};
      fl::SvgSeries s{"adjusted", {}, {}};
      for (const auto& row : p.rows)
        if (row.N_defined) {
          s.x.push_back(row.r);
          s.y.push_back(row.adjusted);
        }
      const std::string base = out + "/" + sanitize(id);
      fl::write_text_atomic(base + "_adjusted.svg",
                            fl::svg_plot("adjusted frequency " + id, "r",
                                         "adjusted N", {s}));
      report.artifacts.push_back(base + "_adjusted.svg");
    }
    const std::string base = out + "/" + sanitize(id);
    fl::write_text_atomic(base + "_profile.csv", fl::profile_csv(p));
    report.artifacts.push_back(base + "_profile.csv");
    timing[sanitize(id) + "_s"] = et.seconds();
  }
  timing["total_s"] = timer.seconds();
  emit(out, report, timing);
  return report.all_pass() ? 0 : 2;
}

int run_order(const fl::ExperimentConfig& cfg, const std::string& out) {
  Timer timer;
  const fl::GaugeGeometry geom = fl::GaugeGeometry::from_id(cfg.geometry);
  if (cfg.entries.empty())
    fl::fail(fl::ErrorKind::Structural, "order needs catalog entries");
  fl::ExperimentReport report;
  report.command = "order";
  report.config_echo = cfg.echo();
  std::map<std::string, double> timing;
  const std::vector<double> window = cfg.order_window();

  std::vector<std::pair<std::string, fl::OrderEstimate>> rows;
  std::vector<fl::SvgSeries> loglog;
  fl::SvgSeries scatter{"slope vs sqrt(K)", {}, {}, true};
  double c2_fit = 0.0;
  for (const std::string& id : cfg.entries) {
    Timer et;
    const fl::CatalogEntry entry = fl::catalog_entry_from_id(geom, id);
    const fl::OrderEstimate est = fl::vanishing_order(geom, entry, window);
    rows.emplace_back(id, est);
    if (entry.known_order) {
      const bool ok = std::abs(est.slope - *entry.known_order) <= 0.05;
      report.add_check("slope/" + id, ok, est.slope, *entry.known_order);
    } else {
      report.add_check("slope/" + id, true, est.slope, 0.0);
    }
    fl::SvgSeries s{sanitize(id), est.radii, est.sups};
    loglog.push_back(s);
    scatter.x.push_back(est.sqrtK);
    scatter.y.push_back(est.slope);
    c2_fit = std::max(c2_fit, est.ratio);
    timing[sanitize(id) + "_s"] = et.seconds();
  }
  report.metrics["C2_fit"] = c2_fit;
  fl::write_text_atomic(out + "/order.csv", fl::order_csv(rows));
  fl::write_text_atomic(out + "/order_loglog.svg",
                        fl::svg_plot("sup norm growth", "r", "sup |u|", loglog,
                                     true, true));
  fl::write_text_atomic(out + "/order_scatter.svg",
                        fl::svg_plot("vanishing order vs sqrt(K)", "sqrt(K)",
                                     "slope", {scatter}));
  report.artifacts = {out + "/order.csv", out + "/order_loglog.svg",
                      out + "/order_scatter.svg"};
  timing["total_s"] = timer.seconds();
  emit(out, report, timing);
  return report.all_pass() ? 0 : 2;
}

int run_solve(const fl::ExperimentConfig& cfg, const std::string& out) {
  Timer timer;
  const fl::GaugeGeometry geom = fl::GaugeGeometry::from_id(cfg.geometry);
  if (cfg.solver.boundary_entry.empty())
    fl::fail(fl::ErrorKind::Structural, "solve needs solver.boundary_entry");
  const fl::CatalogEntry entry =
      fl::catalog_entry_from_id(geom, cfg.solver.boundary_entry);
  fl::GridProblem prob;
  prob.lo = cfg.solver.lo;
  prob.hi = cfg.solver.hi;
  prob.n = cfg.solver.n;
  prob.V = entry.V;
  prob.boundary = entry.u;

  fl::ExperimentReport report;
  report.command = "solve";
  report.config_echo = cfg.echo();
  std::map<std::string, double> timing;

  const fl::DiscreteSolution sol =
      fl::solve(geom, prob, cfg.solver.tol, cfg.solver.max_iter);
  report.add_check("solver_residual", sol.residual_norm <= cfg.solver.tol,
                   sol.residual_norm, cfg.solver.tol);
  const double err = fl::max_interior_error(sol, *entry.u);
  report.metrics["max_interior_error"] = err;
  report.metrics["iterations"] = sol.iterations;
  report.add_check("oracle_error", true, err, 0.0);
  if (cfg.solver.dump) {
    const std::string base = out + "/solution";
    fl::save_solution(sol, base);
    report.artifacts.push_back(base + ".bin");
    report.artifacts.push_back(base + ".json");
  }
  timing["total_s"] = timer.seconds();
  emit(out, report, timing);
  return report.all_pass() ? 0 : 2;
}

int run_report(const std::vector<std::string>& paths, const std::string& out) {
  if (paths.empty())
    fl::fail(fl::ErrorKind::Structural, "report needs at least one input");
  nlohmann::ordered_json summary;
  summary["command"] = "report";
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  std::map<std::string, nlohmann::json> dedup;
  bool all = true;
  for (const std::string& p : paths) {
    std::ifstream in(p);
    if (!in) fl::fail(fl::ErrorKind::Structural, "cannot open " + p);
    nlohmann::json j = nlohmann::json::parse(in);
    const std::string key = j.contains("config") ? j["config"].dump() : p;
    if (dedup.count(key)) continue; // duplicate configs collapse
    dedup[key] = j;
  }
  std::ostringstream csv;
  csv << "entry,K,sqrtK,slope,ratio\n";
  fl::SvgSeries scatter{"slope vs sqrt(K)", {}, {}, true};
  double c2 = 0.0;
  for (const auto& [key, j] : dedup) {
    inputs.push_back(j.value("command", "unknown"));
    all = all && j.value("all_pass", false);
    if (j.value("command", "") == "order" && j.contains("metrics")) {
      for (const auto& [mk, mv] : j["metrics"].items())
        if (mk == "C2_fit") c2 = std::max(c2, mv.get<double>());
    }
    // Pull per-entry slope rows out of order reports' CSV artifacts.
    if (j.contains("artifacts"))
      for (const auto& a : j["artifacts"]) {
        const std::string ap = a.get<std::string>();
        if (ap.size() > 9 && ap.substr(ap.size() - 9) == "order.csv") {
          std::ifstream oc(ap);
          std::string line;
          bool first = true;
          while (std::getline(oc, line)) {
            if (first) {
              first = false;
              continue;
            }
            csv << line << "\n";
            // columns: entry,K,sqrtK,slope,ratio,fit_residual
            std::istringstream ls(line);
            std::string tok;
            std::vector<std::string> cols;
            while (std::getline(ls, tok, ',')) cols.push_back(tok);
            if (cols.size() >= 5) {
              scatter.x.push_back(std::atof(cols[2].c_str()));
              scatter.y.push_back(std::atof(cols[3].c_str()));
            }
          }
        }
      }
  }
  summary["inputs"] = inputs;
  summary["C2_fit"] = c2;
  summary["all_pass"] = all;
  fl::write_text_atomic(out + "/summary.json", summary.dump(2) + "\n");
  fl::write_text_atomic(out + "/cross_k.csv", csv.str());
  fl::write_text_atomic(out + "/cross_k.svg",
                        fl::svg_plot("cross-K vanishing order", "sqrt(K)",
                                     "slope", {scatter}));
  std::cout << (all ? "[PASS] " : "[FAIL] ") << "aggregate of "
            << dedup.size() << " reports\n";
  return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-frequency laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::vector<std::string> report_paths;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    if (need_config)
      cmd->add_option("--config", config_path, "experiment config (JSON)")
          ->required();
    cmd->add_option("--out", out_override, "output directory");
  };

  CLI::App* c_ident = app.add_subcommand("identities", "structural identity suite");
  CLI::App* c_freq = app.add_subcommand("frequency", "H, I, N profiles");
  CLI::App* c_mono = app.add_subcommand("monotonicity", "adjusted-frequency fit");
  CLI::App* c_order = app.add_subcommand("order", "vanishing-order estimation");
  CLI::App* c_solve = app.add_subcommand("solve", "finite-difference solver");
  CLI::App* c_report = app.add_subcommand("report", "aggregate reports");
  for (CLI::App* c : {c_ident, c_freq, c_mono, c_order, c_solve})
    add_common(c, true);
  c_report->add_option("paths", report_paths, "report.json inputs");
  c_report->add_option("--out", out_override, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_report->parsed()) {
      const std::string out = out_override.empty() ? "out" : out_override;
      return run_report(report_paths, out);
    }
    const fl::ExperimentConfig cfg = fl::ExperimentConfig::from_file(config_path);
    const std::string out = out_override.empty() ? cfg.out_dir : out_override;
    std::filesystem::create_directories(out);
    if (c_ident->parsed()) return run_identities(cfg, out);
    if (c_freq->parsed()) return run_frequency(cfg, out);
    if (c_mono->parsed()) return run_monotonicity(cfg, out);
    if (c_order->parsed()) return run_order(cfg, out);
    if (c_solve->parsed()) return run_solve(cfg, out);
  } catch (const fl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
