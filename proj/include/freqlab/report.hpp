#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "freqlab/frequency.hpp"
#include "freqlab/identities.hpp"

namespace freqlab {

/// Shortest round-trip decimal text for a double (std::to_chars), the one
/// formatting used in every CSV/SVG so outputs are byte-stable.
std::string format_double(double v);

/// Writes content to path via temp-file + rename.
void write_text_atomic(const std::string& path, const std::string& content);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;     // measured quantity
  double tolerance = 0.0; // threshold it was held against
  std::string detail;
};

/// Machine-readable record of one verification run. Timings are kept apart
/// from the deterministic payload (see write_timing_json).
struct ExperimentReport {
  std::string command;
  nlohmann::ordered_json config_echo;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  std::vector<std::string> artifacts;

  void add_check(const std::string& name, bool pass, double value,
                 double tolerance, const std::string& detail = "");
  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
};

/// report.json (deterministic, no timings).
void write_report_json(const std::string& dir, const ExperimentReport& report);
/// timing.json (excluded from the determinism contract).
void write_timing_json(const std::string& dir,
                       const std::map<std::string, double>& seconds);

// -- CSV ---------------------------------------------------------------

std::string profile_csv(const FrequencyProfile& p);
std::string identities_csv(const std::vector<IdentityResult>& rs);
std::string order_csv(const std::vector<std::pair<std::string, OrderEstimate>>&
                          entries);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

// -- SVG ---------------------------------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  bool points_only = false;
};

/// Minimal deterministic polyline plot; log axes take log10 upfront.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool logx = false,
                     bool logy = false);

} // namespace freqlab
