#include "freqlab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "freqlab/errors.hpp"

namespace freqlab {

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.schema = j.value("schema", 1);
  if (c.schema != 1)
    fail(ErrorKind::Structural,
         "unsupported config schema " + std::to_string(c.schema));
  c.geometry = j.value("geometry", c.geometry);
  if (j.contains("entries"))
    c.entries = j["entries"].get<std::vector<std::string>>();
  if (j.contains("alpha")) {
    const auto& a = j["alpha"];
    c.alpha_policy = a.value("policy", c.alpha_policy);
    c.alpha_value = a.value("value", c.alpha_value);
    c.allow_hypothesis_violation =
        a.value("allow_hypothesis_violation", false);
    if (c.alpha_policy != "sqrtK" && c.alpha_policy != "explicit")
      fail(ErrorKind::Structural, "alpha policy must be sqrtK or explicit");
  }
  if (j.contains("K")) c.K_list = j["K"].get<std::vector<double>>();
  if (j.contains("dini")) {
    c.dini_kappa = j["dini"].value("kappa", c.dini_kappa);
    c.dini_beta = j["dini"].value("beta", c.dini_beta);
  }
  if (j.contains("r_grid")) {
    c.r_start = j["r_grid"].value("start", c.r_start);
    c.r_stop = j["r_grid"].value("stop", c.r_stop);
    c.r_step = j["r_grid"].value("step", c.r_step);
  }
  if (j.contains("quadrature")) {
    c.quad_points = j["quadrature"].value("points_per_axis", c.quad_points);
    c.quad_rule = j["quadrature"].value("rule", c.quad_rule);
    if (c.quad_rule != "midpoint" && c.quad_rule != "richardson")
      fail(ErrorKind::Structural, "quadrature rule must be midpoint or richardson");
  }
  c.cbar_max_exp = j.value("cbar_max_exp", c.cbar_max_exp);
  c.monotonicity_tol = j.value("monotonicity_tol", c.monotonicity_tol);
  c.order_window_max_r = j.value("order_window_max_r", c.order_window_max_r);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.out_dir = j.value("out", c.out_dir);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    auto arr3d = [&](const char* key, std::array<double, 3>& dst) {
      if (s.contains(key))
        for (int a = 0; a < 3; ++a) dst[a] = s[key][a].get<double>();
    };
    arr3d("lo", c.solver.lo);
    arr3d("hi", c.solver.hi);
    if (s.contains("n"))
      for (int a = 0; a < 3; ++a) c.solver.n[a] = s["n"][a].get<int>();
    c.solver.boundary_entry = s.value("boundary_entry", std::string());
    c.solver.tol = s.value("tol", c.solver.tol);
    c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
    c.solver.dump = s.value("dump", false);
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Structural, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorKind::Structural, std::string("config parse error: ") + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json ExperimentConfig::echo() const {
  nlohmann::ordered_json j;
  j["schema"] = schema;
  j["geometry"] = geometry;
  j["entries"] = entries;
  j["alpha"] = {{"policy", alpha_policy},
                {"value", alpha_value},
                {"allow_hypothesis_violation", allow_hypothesis_violation}};
  j["K"] = K_list;
  j["dini"] = {{"kappa", dini_kappa}, {"beta", dini_beta}};
  j["r_grid"] = {{"start", r_start}, {"stop", r_stop}, {"step", r_step}};
  j["quadrature"] = {{"points_per_axis", quad_points}, {"rule", quad_rule}};
  j["cbar_max_exp"] = cbar_max_exp;
  j["monotonicity_tol"] = monotonicity_tol;
  j["order_window_max_r"] = order_window_max_r;
  j["seed"] = seed;
  j["solver"] = {{"lo", solver.lo},     {"hi", solver.hi},
                 {"n", solver.n},       {"boundary_entry", solver.boundary_entry},
                 {"tol", solver.tol},   {"max_iter", solver.max_iter},
                 {"dump", solver.dump}};
  return j;
}

std::string ExperimentConfig::hash() const {
  // Stable content hash of the echo (FNV-1a), used to deduplicate reports.
  const std::string s = echo().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::vector<double> ExperimentConfig::r_grid() const {
  if (!(r_start > 0.0) || !(r_stop < 1.0) || !(r_step > 0.0) ||
      r_stop <= r_start)
    fail(ErrorKind::Structural, "r_grid must satisfy 0 < start < stop < 1");
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double r = r_start + i * r_step;
    if (r > r_stop + 1e-12) break;
    g.push_back(r);
  }
  return g;
}

std::vector<double> ExperimentConfig::order_window() const {
  std::vector<double> w;
  for (double r : r_grid())
    if (r <= order_window_max_r + 1e-12) w.push_back(r);
  if (w.size() < 2)
    fail(ErrorKind::Structural, "order window holds fewer than two radii");
  return w;
}

QuadratureSpec ExperimentConfig::quadrature() const {
  QuadratureSpec s;
  s.points_per_axis = quad_points;
  s.rule = quad_rule == "richardson" ? QuadratureSpec::Rule::Richardson
                                     : QuadratureSpec::Rule::Midpoint;
  s.threads = threads;
  return s;
}

double ExperimentConfig::alpha_for(double K) const {
  if (alpha_policy == "explicit") return alpha_value;
  return std::sqrt(K);
}

} // namespace freqlab
