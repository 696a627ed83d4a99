#include "freqlab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freqlab/errors.hpp"

namespace freqlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::Structural, "cannot write " + tmp);
    out << content;
  }
  fs::rename(tmp, p);
}

void ExperimentReport::add_check(const std::string& name, bool pass,
                                 double value, double tolerance,
                                 const std::string& detail) {
  checks.push_back({name, pass, value, tolerance, detail});
}

bool ExperimentReport::all_pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

nlohmann::ordered_json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config"] = config_echo;
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const CheckResult& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["value"] = c.value;
    cj["tolerance"] = c.tolerance;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    cs.push_back(cj);
  }
  j["checks"] = cs;
  j["metrics"] = metrics;
  j["artifacts"] = artifacts;
  j["all_pass"] = all_pass();
  return j;
}

void write_report_json(const std::string& dir, const ExperimentReport& report) {
  write_text_atomic(dir + "/report.json", report.to_json().dump(2) + "\n");
}

void write_timing_json(const std::string& dir,
                       const std::map<std::string, double>& seconds) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : seconds) j[k] = v;
  write_text_atomic(dir + "/timing.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string profile_csv(const FrequencyProfile& p) {
  std::ostringstream os;
  os << "r,H,H_err,I,I_err,N,N_defined,uZu_psi,gradsq_alpha,Vusq_alpha,"
        "Hp_fd,Hp_identity,Hp_residual,Ip_fd,Ip_identity,Ip_residual,"
        "envelope,adjusted,H_coarse,I_coarse\n";
  for (const ProfileRow& r : p.rows) {
    os << format_double(r.r) << ',' << format_double(r.H) << ','
       << format_double(r.H_err) << ',' << format_double(r.I) << ','
       << format_double(r.I_err) << ',' << format_double(r.N) << ','
       << (r.N_defined ? 1 : 0) << ',' << format_double(r.uZu_psi) << ','
       << format_double(r.gradsq_a) << ',' << format_double(r.Vusq_a) << ','
       << format_double(r.Hp_fd) << ',' << format_double(r.Hp_identity) << ','
       << format_double(r.Hp_residual) << ',' << format_double(r.Ip_fd) << ','
       << format_double(r.Ip_identity) << ',' << format_double(r.Ip_residual)
       << ',' << format_double(r.envelope) << ',' << format_double(r.adjusted)
       << ',' << format_double(r.H_coarse) << ',' << format_double(r.I_coarse)
       << '\n';
  }
  return os.str();
}

std::string identities_csv(const std::vector<IdentityResult>& rs) {
  std::ostringstream os;
  os << "identity,worst_error,tolerance,pass\n";
  for (const IdentityResult& r : rs)
    os << r.name << ',' << format_double(r.worst) << ','
       << format_double(r.tol) << ',' << (r.pass ? 1 : 0) << '\n';
  return os.str();
}

std::string order_csv(
    const std::vector<std::pair<std::string, OrderEstimate>>& entries) {
  std::ostringstream os;
  os << "entry,K,sqrtK,slope,ratio,fit_residual\n";
  for (const auto& [id, e] : entries)
    os << id << ',' << format_double(e.sqrtK * e.sqrtK) << ','
       << format_double(e.sqrtK) << ',' << format_double(e.slope) << ','
       << format_double(e.ratio) << ',' << format_double(e.fit_residual)
       << '\n';
  return os.str();
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "points,value,delta,est_order\n";
  for (const ConvergenceRow& r : rows)
    os << r.points << ',' << format_double(r.value) << ','
       << format_double(r.delta) << ',' << format_double(r.est_order) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

double nice_lo(double lo, double hi) { return lo - 0.05 * (hi - lo + 1e-12); }
double nice_hi(double lo, double hi) { return hi + 0.05 * (hi - lo + 1e-12); }

} // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel,
                     const std::vector<SvgSeries>& series, bool logx,
                     bool logy) {
  const int W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  auto tx = [&](double v, double lo, double hi, int a, int b) {
    return a + (v - lo) / (hi - lo) * (b - a);
  };

  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  std::vector<SvgSeries> data = series;
  for (SvgSeries& s : data)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (logx) s.x[i] = std::log10(s.x[i]);
      if (logy) s.y[i] = std::log10(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  if (xlo > xhi) {
    xlo = 0;
    xhi = 1;
    ylo = 0;
    yhi = 1;
  }
  const double XLO = nice_lo(xlo, xhi), XHI = nice_hi(xlo, xhi);
  const double YLO = nice_lo(ylo, yhi), YHI = nice_hi(ylo, yhi);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
     << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = XLO + (XHI - XLO) * t / 5.0;
    const double fy = YLO + (YHI - YLO) * t / 5.0;
    const double px = tx(fx, XLO, XHI, ml, W - mr);
    const double py = tx(fy, YLO, YHI, H - mb, mt);
    os << "<line x1=\"" << format_double(px) << "\" y1=\"" << H - mb
       << "\" x2=\"" << format_double(px) << "\" y2=\"" << H - mb + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << format_double(px) << "\" y=\"" << H - mb + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"10\">"
       << format_double(std::round(fx * 1e4) / 1e4) << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << format_double(py)
       << "\" x2=\"" << ml << "\" y2=\"" << format_double(py)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << format_double(py + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << format_double(std::round(fy * 1e4) / 1e4) << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">"
     << xlabel << (logx ? " (log10)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 16 "
     << (mt + H - mb) / 2 << ")\">" << ylabel << (logy ? " (log10)" : "")
     << "</text>\n";

  int ci = 0;
  for (const SvgSeries& s : data) {
    const char* color = kPalette[ci % 8];
    if (!s.points_only) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << format_double(tx(s.x[i], XLO, XHI, ml, W - mr)) << ','
           << format_double(tx(s.y[i], YLO, YHI, H - mb, mt)) << ' ';
      }
      os << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << format_double(tx(s.x[i], XLO, XHI, ml, W - mr))
           << "\" cy=\"" << format_double(tx(s.y[i], YLO, YHI, H - mb, mt))
           << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    os << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 16 + 14 * ci
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
          "fill=\""
       << color << "\">" << s.label << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace freqlab
