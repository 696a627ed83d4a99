#include "freqlab/frequency.hpp"

#include <algorithm>
#include <cmath>

#include "freqlab/errors.hpp"

namespace freqlab {

namespace {

// Component layout of the profile sweep; all share one field jet per node.
//   0: u^2 psi          weight alpha
//   1: |grad_H u|^2     weight alpha+1
//   2: V u^2            weight alpha+1
//   3: u Zu psi         weight alpha
//   4: |grad_H u|^2     weight alpha
//   5: V u^2            weight alpha
constexpr int kProfileComps = 6;
const std::vector<int> kProfileOffsets = {0, 1, 1, 0, 0, 0};

MultiIntegrand profile_integrand(const GaugeGeometry& geom,
                                 const CatalogEntry& entry) {
  const ScalarField* u = entry.u.get();
  const ScalarField* vf = entry.V.field.get();
  const bool vlp = entry.V_is_lambda_psi;
  const double lambda = entry.lambda;
  const int m = geom.hdim(), n = geom.dim();
  return [&geom, u, vf, vlp, lambda, m, n](const Vec& x, double rho2,
                                           double* vals) {
    const Jet uj = u->jet(x);
    const double rho = std::sqrt(rho2);
    Vec rg;
    geom.gauge_grad(x, rho, rg);
    double A[kMaxDim * kMaxDim];
    geom.horizontal_frame(x, A);
    double psi = 0.0, gradsq = 0.0;
    for (int i = 0; i < m; ++i) {
      double xr = 0.0, xu = 0.0;
      const double* ai = A + i * n;
      for (int k = 0; k < n; ++k) {
        xr += ai[k] * rg.a[k];
        xu += ai[k] * uj.d[k];
      }
      psi += xr * xr;
      gradsq += xu * xu;
    }
    const double zu = geom.apply_Z(uj, x);
    const double v = vlp ? -lambda * psi : (vf ? vf->value(x) : 0.0);
    const double usq = uj.v * uj.v;
    vals[0] = usq * psi;
    vals[1] = gradsq;
    vals[2] = v * usq;
    vals[3] = uj.v * zu * psi;
    vals[4] = gradsq;
    vals[5] = v * usq;
  };
}

struct SweepValues {
  double H, H_err, H_coarse;
  double I, I_err, I_coarse;
  double uZu, uZu_err;
  double gradsq_a, gradsq_a_err;
  double Vusq_a, Vusq_a_err;
};

SweepValues profile_sweep(const GaugeGeometry& geom, const CatalogEntry& entry,
                          double r, double alpha, const QuadratureSpec& spec) {
  const MultiResult mr =
      integrate_ball_multi(geom, kProfileComps, profile_integrand(geom, entry),
                           r, alpha, kProfileOffsets, spec);
  SweepValues s{};
  s.H = mr.value[0];
  s.H_err = mr.error_estimate[0];
  s.H_coarse = mr.coarse[0];
  s.I = mr.value[1] + mr.value[2];
  s.I_err = mr.error_estimate[1] + mr.error_estimate[2];
  s.I_coarse = mr.coarse[1] + mr.coarse[2];
  s.uZu = mr.value[3];
  s.uZu_err = mr.error_estimate[3];
  s.gradsq_a = mr.value[4];
  s.gradsq_a_err = mr.error_estimate[4];
  s.Vusq_a = mr.value[5];
  s.Vusq_a_err = mr.error_estimate[5];
  return s;
}

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

} // namespace

double FrequencyProfile::floor_for(double r, int Q, double alpha) {
  return 1e-14 * std::pow(r, Q + 2.0 * alpha);
}

QuadratureResult height(const GaugeGeometry& geom, const CatalogEntry& entry,
                        double r, double alpha, const QuadratureSpec& spec) {
  if (!(r > 0.0) || r >= 1.0)
    fail(ErrorKind::Domain, "height radius must lie in (0,1)");
  if (!(alpha > 0.0)) fail(ErrorKind::Domain, "height needs alpha > 0");
  const SweepValues s = profile_sweep(geom, entry, r, alpha, spec);
  return {s.H, s.H_err, 0};
}

QuadratureResult energy(const GaugeGeometry& geom, const CatalogEntry& entry,
                        double r, double alpha, const QuadratureSpec& spec) {
  if (!(r > 0.0) || r >= 1.0)
    fail(ErrorKind::Domain, "energy radius must lie in (0,1)");
  const SweepValues s = profile_sweep(geom, entry, r, alpha, spec);
  return {s.I, s.I_err, 0};
}

FrequencyProfile frequency_profile(const GaugeGeometry& geom,
                                   const CatalogEntry& entry,
                                   const std::vector<double>& r_grid,
                                   double alpha, const QuadratureSpec& spec,
                                   const DiniModulus& envelope_modulus) {
  if (r_grid.size() < 2)
    fail(ErrorKind::Domain, "frequency profile needs at least two radii");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0) || r_grid[i] >= 1.0)
      fail(ErrorKind::Domain, "profile radii must lie in (0,1)");
    if (i > 0 && r_grid[i] <= r_grid[i - 1])
      fail(ErrorKind::Domain, "profile radii must increase");
  }
  if (entry.valid_region.kind == Region::Annulus)
    fail(ErrorKind::Domain,
         "frequency profiles need ball-valid entries (annulus entries are "
         "for stress tests)");
  if (r_grid.back() > entry.valid_region.b)
    fail(ErrorKind::Domain, "profile grid exceeds the entry's valid region");

  FrequencyProfile p;
  p.entry_id = entry.id;
  p.alpha = alpha;
  p.K = entry.K;
  p.rows.resize(r_grid.size());
  int defined = 0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double r = r_grid[i];
    const SweepValues s = profile_sweep(geom, entry, r, alpha, spec);
    ProfileRow& row = p.rows[i];
    row.r = r;
    row.H = s.H;
    row.H_err = s.H_err;
    row.H_coarse = s.H_coarse;
    row.I = s.I;
    row.I_err = s.I_err;
    row.I_coarse = s.I_coarse;
    row.uZu_psi = s.uZu;
    row.uZu_psi_err = s.uZu_err;
    row.gradsq_a = s.gradsq_a;
    row.gradsq_a_err = s.gradsq_a_err;
    row.Vusq_a = s.Vusq_a;
    row.Vusq_a_err = s.Vusq_a_err;
    if (s.H > FrequencyProfile::floor_for(r, geom.Q(), alpha)) {
      row.N_defined = true;
      row.N = s.I / s.H;
      ++defined;
    }
    row.envelope = envelope_modulus.f(r) / r * s.H;
  }
  if (defined == 0)
    fail(ErrorKind::Degenerate,
         "height below numeric floor on the whole grid (u == 0?)");

  // Grid finite differences against the exact identities.
  const int Q = geom.Q();
  for (std::size_t i = 1; i + 1 < p.rows.size(); ++i) {
    ProfileRow& row = p.rows[i];
    const double dr = p.rows[i + 1].r - p.rows[i - 1].r;
    row.Hp_fd = (p.rows[i + 1].H - p.rows[i - 1].H) / dr;
    row.Ip_fd = (p.rows[i + 1].I - p.rows[i - 1].I) / dr;
    row.Hp_identity =
        (2.0 * alpha + Q) / row.r * row.H + 2.0 / row.r * row.uZu_psi;
    row.Ip_identity = 2.0 * (alpha + 1.0) * row.r * (row.gradsq_a + row.Vusq_a);
    row.Hp_residual = rel_gap(row.Hp_fd, row.Hp_identity);
    row.Ip_residual = rel_gap(row.Ip_fd, row.Ip_identity);
  }
  return p;
}

FrequencyProfile coarse_profile(const GaugeGeometry& geom,
                                const FrequencyProfile& p) {
  FrequencyProfile c = p;
  for (ProfileRow& row : c.rows) {
    row.H = row.H_coarse;
    row.I = row.I_coarse;
    row.N_defined =
        row.H > FrequencyProfile::floor_for(row.r, geom.Q(), p.alpha);
    row.N = row.N_defined ? row.I / row.H : 0.0;
  }
  return c;
}

DerivativeCheck height_derivative_check(const GaugeGeometry& geom,
                                        const CatalogEntry& entry, double r,
                                        double alpha, double delta,
                                        const QuadratureSpec& spec) {
  if (!(delta > 0.0) || r - delta <= 0.0 || r + delta >= 1.0)
    fail(ErrorKind::Domain, "derivative check needs 0 < r-delta, r+delta < 1");
  const SweepValues at = profile_sweep(geom, entry, r, alpha, spec);
  const SweepValues lo = profile_sweep(geom, entry, r - delta, alpha, spec);
  const SweepValues hi = profile_sweep(geom, entry, r + delta, alpha, spec);
  DerivativeCheck out;
  out.r = r;
  out.fd = (hi.H - lo.H) / (2.0 * delta);
  out.identity =
      (2.0 * alpha + geom.Q()) / r * at.H + 2.0 / r * at.uZu;
  out.residual = rel_gap(out.fd, out.identity);
  return out;
}

DerivativeCheck energy_derivative_check(const GaugeGeometry& geom,
                                        const CatalogEntry& entry, double r,
                                        double alpha, double delta,
                                        const QuadratureSpec& spec) {
  if (!(delta > 0.0) || r - delta <= 0.0 || r + delta >= 1.0)
    fail(ErrorKind::Domain, "derivative check needs 0 < r-delta, r+delta < 1");
  const SweepValues at = profile_sweep(geom, entry, r, alpha, spec);
  const SweepValues lo = profile_sweep(geom, entry, r - delta, alpha, spec);
  const SweepValues hi = profile_sweep(geom, entry, r + delta, alpha, spec);
  DerivativeCheck out;
  out.r = r;
  out.fd = (hi.I - lo.I) / (2.0 * delta);
  out.identity = 2.0 * (alpha + 1.0) * r * (at.gradsq_a + at.Vusq_a);
  out.residual = rel_gap(out.fd, out.identity);
  return out;
}

RellichBalance rellich_balance(const GaugeGeometry& geom, const FieldPtr& u,
                               double r, double alpha,
                               const QuadratureSpec& spec) {
  if (alpha < 0.0) fail(ErrorKind::Domain, "rellich balance needs alpha >= 0");
  // Components (weight offset from base alpha):
  //   0: |grad_H u|^2                        (+1)
  //   1: rho^2 |grad_H u|^2                  (+0)
  //   2: rho <grad_H u, grad_H rho> Zu       (+0)
  //   3: Zu Delta_H u                        (+1)
  const ScalarField* uf = u.get();
  const int m = geom.hdim(), n = geom.dim();
  MultiIntegrand fn = [&geom, uf, m, n](const Vec& x, double rho2,
                                        double* vals) {
    const Jet uj = uf->jet(x);
    const double rho = std::sqrt(rho2);
    Vec rg;
    geom.gauge_grad(x, rho, rg);
    double A[kMaxDim * kMaxDim];
    geom.horizontal_frame(x, A);
    double gradsq = 0.0, mixed = 0.0;
    for (int i = 0; i < m; ++i) {
      double xr = 0.0, xu = 0.0;
      const double* ai = A + i * n;
      for (int k = 0; k < n; ++k) {
        xr += ai[k] * rg.a[k];
        xu += ai[k] * uj.d[k];
      }
      gradsq += xu * xu;
      mixed += xu * xr;
    }
    const double zu = geom.apply_Z(uj, x);
    vals[0] = gradsq;
    vals[1] = rho2 * gradsq;
    vals[2] = rho * mixed * zu;
    vals[3] = zu * geom.sublaplacian(uj, x);
  };
  const MultiResult mr =
      integrate_ball_multi(geom, 4, fn, r, alpha, {1, 0, 0, 1}, spec);
  const double a1 = alpha + 1.0;
  RellichBalance out;
  out.T1 = geom.Q() * mr.value[0] - 2.0 * a1 * mr.value[1];
  out.T2 = 4.0 * a1 * mr.value[2] - 2.0 * mr.value[0];
  out.T3 = -2.0 * mr.value[3];
  // T1 and T2 can vanish identically (homogeneous u), so normalize by the
  // largest constituent piece rather than the combined terms.
  const double scale =
      std::max({std::abs(geom.Q() * mr.value[0]), std::abs(2.0 * a1 * mr.value[1]),
                std::abs(4.0 * a1 * mr.value[2]), std::abs(2.0 * mr.value[0]),
                std::abs(2.0 * mr.value[3]), 1e-300});
  out.residual = std::abs(out.T1 + out.T2 + out.T3) / scale;
  return out;
}

namespace {

void require_alpha_hypothesis(double alpha, double K, bool allow) {
  if (allow) return;
  const double s = std::sqrt(K);
  if (std::abs(alpha - s) > 1e-12 * std::max(1.0, s))
    fail(ErrorKind::HypothesisViolation,
         "adjusted frequency requires alpha = sqrt(K); pass the explicit "
         "override to explore anyway");
}

long double adjusted_value(const ProfileRow& row, const DiniModulus& f,
                           long double cbar, double K) {
  const long double F = f.primitive(row.r);
  return std::exp(cbar * F) *
         ((long double)row.N + cbar * K * (row.r * row.r + F));
}

} // namespace

std::vector<double> adjusted_frequency(const FrequencyProfile& profile,
                                       const DiniModulus& f, double cbar,
                                       double K,
                                       bool allow_hypothesis_violation) {
  require_alpha_hypothesis(profile.alpha, K, allow_hypothesis_violation);
  std::vector<double> out;
  out.reserve(profile.rows.size());
  for (const ProfileRow& row : profile.rows)
    out.push_back(row.N_defined
                      ? static_cast<double>(adjusted_value(row, f, cbar, K))
                      : std::numeric_limits<double>::quiet_NaN());
  return out;
}

std::vector<double> default_cbar_grid(int max_exp) {
  std::vector<double> g;
  for (int e = 0; e <= max_exp; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

MonotonicityReport fit_min_cbar(const FrequencyProfile& profile,
                                const DiniModulus& f, double K,
                                const std::vector<double>& cbar_grid,
                                double tol, bool allow_hypothesis_violation) {
  require_alpha_hypothesis(profile.alpha, K, allow_hypothesis_violation);
  if (cbar_grid.empty())
    fail(ErrorKind::Domain, "fit_min_cbar needs a candidate grid");
  MonotonicityReport rep;
  rep.tolerance = tol;
  rep.candidates = cbar_grid;
  for (double cbar : cbar_grid) {
    std::vector<std::pair<double, double>> viol;
    long double prev = 0.0;
    bool have_prev = false;
    for (const ProfileRow& row : profile.rows) {
      if (!row.N_defined) continue;
      const long double v = adjusted_value(row, f, cbar, K);
      if (have_prev) {
        const long double scale =
            std::max({std::abs((double)prev), std::abs((double)v), 1e-30});
        if (v - prev < -(long double)tol * scale)
          viol.emplace_back(row.r, (double)((prev - v) / scale));
      }
      prev = v;
      have_prev = true;
    }
    rep.violation_counts.push_back(static_cast<int>(viol.size()));
    if (viol.empty()) {
      rep.cbar_fitted = cbar;
      return rep;
    }
    rep.violations = std::move(viol);
  }
  return rep; // cbar_fitted absent: nothing on the grid succeeded
}

TwoRadiusCheck two_radius_check(const FrequencyProfile& profile,
                                const DiniModulus& f, double cbar, double K) {
  TwoRadiusCheck out;
  const long double F1 = f.primitive(1.0);
  const long double c1 = std::exp((long double)cbar * F1);
  const long double c2 = (long double)cbar * (1.0 + (double)F1);
  out.c1_tilde = static_cast<double>(c1);
  out.c2_tilde = static_cast<double>(c2);
  long double worst = -1e300L;
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    if (!profile.rows[i].N_defined) continue;
    for (std::size_t j = i + 1; j < profile.rows.size(); ++j) {
      if (!profile.rows[j].N_defined) continue;
      const long double margin =
          (long double)profile.rows[i].N -
          c1 * ((long double)profile.rows[j].N + c2 * K);
      worst = std::max(worst, margin);
    }
  }
  out.worst_margin = static_cast<double>(worst);
  out.pass = worst <= 0.0L;
  return out;
}

PositivityCheck positivity_check(const FrequencyProfile& profile, double K) {
  PositivityCheck out;
  double worst = 1e300;
  for (const ProfileRow& row : profile.rows) {
    const double band = row.I_err + K * row.r * row.r * row.H_err;
    const double value = row.I + K * row.r * row.r * row.H;
    worst = std::min(worst, value + band);
  }
  out.worst_margin = worst;
  out.pass = worst >= 0.0;
  return out;
}

double sup_norm_on_ball(const GaugeGeometry& geom, const ScalarField& u,
                        double r, int coarse_points, int rounds, int keep) {
  const int n = geom.dim();
  const Vec w = geom.ball_box_halfwidths(r);
  struct Candidate {
    double val;
    Vec x;
  };
  std::vector<Candidate> top;

  auto consider = [&](const Vec& x) {
    if (geom.gauge(x) > r) return;
    const double v = std::abs(u.value(x));
    if (static_cast<int>(top.size()) < keep) {
      top.push_back({v, x});
      std::sort(top.begin(), top.end(),
                [](const Candidate& a, const Candidate& b) {
                  return a.val > b.val;
                });
      return;
    }
    if (v > top.back().val) {
      top.back() = {v, x};
      std::sort(top.begin(), top.end(),
                [](const Candidate& a, const Candidate& b) {
                  return a.val > b.val;
                });
    }
  };

  // Coarse lattice including box corners.
  std::array<double, kMaxDim> step{};
  {
    Vec x(n);
    std::array<int, kMaxDim> idx{};
    for (int k = 0; k < n; ++k)
      step[k] = 2.0 * w.a[k] / (coarse_points - 1);
    for (;;) {
      for (int k = 0; k < n; ++k) x.a[k] = -w.a[k] + idx[k] * step[k];
      consider(x);
      int k = 0;
      for (; k < n; ++k) {
        if (++idx[k] < coarse_points) break;
        idx[k] = 0;
      }
      if (k == n) break;
    }
  }

  // Local refinement around the current maxima.
  for (int round = 0; round < rounds; ++round) {
    const std::vector<Candidate> seeds = top;
    for (int k = 0; k < n; ++k) step[k] *= 0.4;
    for (const Candidate& s : seeds) {
      std::array<int, kMaxDim> idx{};
      Vec x(n);
      for (;;) {
        for (int k = 0; k < n; ++k)
          x.a[k] = s.x.a[k] + (idx[k] - 2) * step[k];
        consider(x);
        int k = 0;
        for (; k < n; ++k) {
          if (++idx[k] < 5) break;
          idx[k] = 0;
        }
        if (k == n) break;
      }
    }
  }
  return top.empty() ? 0.0 : top.front().val;
}

OrderEstimate vanishing_order(const GaugeGeometry& geom,
                              const CatalogEntry& entry,
                              const std::vector<double>& window_radii) {
  if (window_radii.size() < 2)
    fail(ErrorKind::Domain, "vanishing order fit needs at least two radii");
  OrderEstimate out;
  out.sqrtK = std::sqrt(entry.K);
  for (double r : window_radii) {
    const double s = sup_norm_on_ball(geom, *entry.u, r);
    if (s < 1e-300)
      fail(ErrorKind::Degenerate, "sup norm below floor at r=" +
                                      std::to_string(r));
    out.radii.push_back(r);
    out.sups.push_back(s);
  }
  // Least squares on (log r, log sup).
  const std::size_t m = out.radii.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(out.radii[i]);
    const double y = std::log(out.sups[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = m * sxx - sx * sx;
  out.slope = (m * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / m;
  for (std::size_t i = 0; i < m; ++i) {
    const double fit = out.intercept + out.slope * std::log(out.radii[i]);
    out.fit_residual =
        std::max(out.fit_residual, std::abs(std::log(out.sups[i]) - fit));
  }
  out.ratio = out.slope / std::max(out.sqrtK, 1e-300);
  return out;
}

} // namespace freqlab
