#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "freqlab/geometry.hpp"
#include "freqlab/quadrature.hpp"

namespace freqlab {

/// Versioned experiment configuration ("schema": 1). Every run is fully
/// determined by this structure plus the binary, which is what makes reruns
/// byte-identical.
struct ExperimentConfig {
  int schema = 1;
  std::string geometry = "heisenberg:1";
  std::vector<std::string> entries;

  std::string alpha_policy = "sqrtK"; // "sqrtK" | "explicit"
  double alpha_value = 1.0;
  bool allow_hypothesis_violation = false;

  std::vector<double> K_list;

  double dini_kappa = 1.0;
  double dini_beta = 1.0;

  double r_start = 0.1, r_stop = 0.9, r_step = 0.02;

  int quad_points = 64;
  std::string quad_rule = "midpoint";

  int cbar_max_exp = 10;
  double monotonicity_tol = 1e-3;
  double order_window_max_r = 0.3;

  std::uint64_t seed = 0x5eed;
  int threads = 0;
  std::string out_dir = "out";

  struct SolverSection {
    std::array<double, 3> lo{-0.8, -0.8, -0.64};
    std::array<double, 3> hi{0.8, 0.8, 0.64};
    std::array<int, 3> n{24, 24, 48};
    std::string boundary_entry; // catalog id supplying data and V
    double tol = 1e-10;
    int max_iter = 20000;
    bool dump = false;
  } solver;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);

  nlohmann::ordered_json echo() const; // deterministic config echo
  std::string hash() const;            // dedup key for cmd_report

  std::vector<double> r_grid() const;
  std::vector<double> order_window() const; // r_grid entries <= window max
  QuadratureSpec quadrature() const;
  DiniModulus dini() const { return DiniModulus(dini_kappa, dini_beta); }
  /// alpha for an entry with constant K; enforces alpha = sqrt(K) under the
  /// sqrtK policy.
  double alpha_for(double K) const;
};

} // namespace freqlab
