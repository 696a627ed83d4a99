#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "freqlab/config.hpp"
#include "freqlab/errors.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/report.hpp"

using namespace freqlab;

TEST_CASE("format_double is shortest round-trip and stable") {
  for (double v : {0.1, 1.0 / 3.0, 1e-14, -2.5, 12345.678, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::atof(s.c_str()) == v);
    CHECK(s == format_double(v));
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("config parse, echo and r_grid") {
  const std::string doc = R"({
    "schema": 1,
    "geometry": "heisenberg:1",
    "entries": ["heisenberg1/radial-eig?lambda=4"],
    "alpha": {"policy": "sqrtK"},
    "K": [4],
    "dini": {"kappa": 1.0, "beta": 1.0},
    "r_grid": {"start": 0.1, "stop": 0.9, "step": 0.02},
    "quadrature": {"points_per_axis": 64, "rule": "midpoint"},
    "seed": 42
  })";
  const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(doc));
  CHECK(cfg.geometry == "heisenberg:1");
  CHECK(cfg.r_grid().size() == 41);
  CHECK(cfg.r_grid().front() == doctest::Approx(0.1));
  CHECK(cfg.r_grid().back() == doctest::Approx(0.9));
  CHECK(cfg.alpha_for(16.0) == doctest::Approx(4.0));
  CHECK(cfg.order_window().back() <= 0.3 + 1e-12);

  // echo and hash are deterministic
  CHECK(cfg.echo().dump() ==
        ExperimentConfig::from_json(nlohmann::json::parse(doc)).echo().dump());
  CHECK(cfg.hash() ==
        ExperimentConfig::from_json(nlohmann::json::parse(doc)).hash());

  ExperimentConfig ex = cfg;
  ex.alpha_policy = "explicit";
  ex.alpha_value = 1.5;
  CHECK(ex.alpha_for(16.0) == doctest::Approx(1.5));
  CHECK(ex.hash() != cfg.hash());

  CHECK_THROWS_AS(
      ExperimentConfig::from_json(nlohmann::json::parse("{\"schema\": 2}")),
      Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(
                      R"({"alpha": {"policy": "nope"}})")),
                  Error);
}

TEST_CASE("report json is deterministic and carries no timings") {
  ExperimentReport rep;
  rep.command = "identities";
  rep.config_echo = nlohmann::ordered_json{{"geometry", "heisenberg:1"}};
  rep.add_check("Z_rho_eq_rho", true, 1e-15, 1e-8);
  rep.add_check("gauge_harmonicity_oracle", true, 3e-16, 1e-8);
  rep.metrics["cbar"] = 1.0;
  const std::string a = rep.to_json().dump(2);
  const std::string b = rep.to_json().dump(2);
  CHECK(a == b);
  CHECK(a.find("wall") == std::string::npos);
  CHECK(a.find("timing") == std::string::npos);
  CHECK(rep.all_pass());
  rep.add_check("failing", false, 1.0, 0.5);
  CHECK(!rep.all_pass());
}

TEST_CASE("csv writers produce stable headers and rows") {
  FrequencyProfile p;
  p.entry_id = "x";
  p.alpha = 1.0;
  ProfileRow row;
  row.r = 0.5;
  row.H = 2.0;
  row.I = 4.0;
  row.N = 2.0;
  row.N_defined = true;
  p.rows.push_back(row);
  const std::string csv = profile_csv(p);
  CHECK(csv.find("r,H,H_err,I,I_err,N,") == 0);
  CHECK(csv.find("\n0.5,2,0,4,0,2,1,") != std::string::npos);
  CHECK(csv == profile_csv(p));

  std::vector<IdentityResult> ids{{"Z_rho_eq_rho", 1e-15, 1e-8, true}};
  const std::string icsv = identities_csv(ids);
  CHECK(icsv.find("identity,worst_error,tolerance,pass") == 0);
  CHECK(icsv.find("Z_rho_eq_rho,1e-15,1e-08,1") != std::string::npos);
}

TEST_CASE("svg plots are regenerable byte-for-byte from the same data") {
  SvgSeries s;
  s.label = "N(r)";
  s.x = {0.1, 0.2, 0.3};
  s.y = {1.0, 2.0, 2.5};
  const std::string a = svg_plot("t", "r", "N", {s});
  const std::string b = svg_plot("t", "r", "N", {s});
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("polyline") != std::string::npos);
  CHECK(a.find("N(r)") != std::string::npos);

  SvgSeries pts = s;
  pts.points_only = true;
  const std::string c = svg_plot("t", "x", "y", {pts}, true, true);
  CHECK(c.find("circle") != std::string::npos);
}

TEST_CASE("atomic write leaves no temp file behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "freqlab_report_test";
  fs::create_directories(dir);
  const std::string path = (dir / "a.csv").string();
  write_text_atomic(path, "x,y\n1,2\n");
  CHECK(fs::exists(path));
  CHECK(!fs::exists(path + ".tmp"));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y");
  fs::remove_all(dir);
}
