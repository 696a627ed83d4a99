#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqlab/catalog.hpp"
#include "freqlab/quadrature.hpp"

namespace freqlab {

/// Everything the lab measures at one radius. H carries the weight
/// (r^2-rho^2)^alpha and the psi factor; I carries weight alpha+1 and no psi
/// on the gradient term.
struct ProfileRow {
  double r = 0.0;
  double H = 0.0, H_err = 0.0;
  double I = 0.0, I_err = 0.0;
  double H_coarse = 0.0, I_coarse = 0.0; // halved-resolution values
  bool N_defined = false;
  double N = 0.0;
  // companion integrals at weight alpha (exact-identity right sides)
  double uZu_psi = 0.0, uZu_psi_err = 0.0;
  double gradsq_a = 0.0, gradsq_a_err = 0.0;
  double Vusq_a = 0.0, Vusq_a_err = 0.0;
  // grid finite differences and identity residuals (interior rows)
  double Hp_fd = 0.0, Ip_fd = 0.0;
  double Hp_identity = 0.0, Ip_identity = 0.0;
  double Hp_residual = -1.0, Ip_residual = -1.0; // -1 where FD unavailable
  double envelope = 0.0; // f(r)/r * H(r)
  double adjusted = 0.0; // adjusted frequency at the fitted C-bar
};

struct FrequencyProfile {
  std::string entry_id;
  double alpha = 1.0;
  double K = 1.0;
  std::vector<ProfileRow> rows;

  /// Numeric floor below which N is not formed: dilation-invariant scale
  /// 1e-14 * r^{Q+2alpha}, so legitimately tiny weighted heights at large
  /// alpha survive while u == 0 does not.
  static double floor_for(double r, int Q, double alpha);
};

/// H(r) = integral over B_r of u^2 psi (r^2-rho^2)^alpha.
QuadratureResult height(const GaugeGeometry& geom, const CatalogEntry& entry,
                        double r, double alpha, const QuadratureSpec& spec);

/// I(r) = integral over B_r of (|grad_H u|^2 + V u^2)(r^2-rho^2)^{alpha+1}.
QuadratureResult energy(const GaugeGeometry& geom, const CatalogEntry& entry,
                        double r, double alpha, const QuadratureSpec& spec);

/// Full profile over an increasing radius grid in (0,1). One quadrature
/// sweep per radius feeds H, I, and the identity right sides.
FrequencyProfile frequency_profile(const GaugeGeometry& geom,
                                   const CatalogEntry& entry,
                                   const std::vector<double>& r_grid,
                                   double alpha, const QuadratureSpec& spec,
                                   const DiniModulus& envelope_modulus =
                                       DiniModulus(1.0, 1.0));

/// Profile rebuilt from the stored halved-resolution integrals.
FrequencyProfile coarse_profile(const GaugeGeometry& geom,
                                const FrequencyProfile& p);

struct DerivativeCheck {
  double r = 0.0;
  double fd = 0.0;        // central difference at step delta
  double identity = 0.0;  // exact-identity right side by quadrature
  double residual = 0.0;  // |fd-identity| / max(|fd|,|identity|,floor)
};

/// H'(r) = (2a+Q)/r H + (2/r) int u Zu (r^2-rho^2)^a psi  (exact identity).
DerivativeCheck height_derivative_check(const GaugeGeometry& geom,
                                        const CatalogEntry& entry, double r,
                                        double alpha, double delta,
                                        const QuadratureSpec& spec);

/// I'(r) = 2(a+1)r [ int |grad_H u|^2 w^a + int V u^2 w^a ]  (exact identity).
DerivativeCheck energy_derivative_check(const GaugeGeometry& geom,
                                        const CatalogEntry& entry, double r,
                                        double alpha, double delta,
                                        const QuadratureSpec& spec);

struct RellichBalance {
  double T1 = 0.0; // int div F |grad_H u|^2
  double T2 = 0.0; // -2 int sum_i X_i u [X_i, F] u
  double T3 = 0.0; // -2 int F u Delta_H u
  double residual = 0.0; // (T1+T2+T3) / max magnitude
};

/// Integration-by-parts balance for F = (r^2-rho^2)^{alpha+1} Z; boundary
/// terms vanish because the weight does.
RellichBalance rellich_balance(const GaugeGeometry& geom, const FieldPtr& u,
                               double r, double alpha,
                               const QuadratureSpec& spec);

/// exp(Cbar F(r)) (N(r) + Cbar K (r^2 + F(r))) over the grid, with
/// F(r) = int_0^r f(t)/t dt in closed form. Requires alpha == sqrt(K)
/// unless allow_hypothesis_violation.
std::vector<double> adjusted_frequency(const FrequencyProfile& profile,
                                       const DiniModulus& f, double cbar,
                                       double K,
                                       bool allow_hypothesis_violation = false);

struct MonotonicityReport {
  std::optional<double> cbar_fitted;
  double tolerance = 1e-3;
  std::vector<double> candidates;
  std::vector<int> violation_counts; // per candidate
  /// Violations for the largest candidate that still failed (empty when the
  /// first candidate already succeeds).
  std::vector<std::pair<double, double>> violations; // (r, drop magnitude)
};

/// Smallest grid C-bar making the adjusted map nondecreasing up to
/// -tol * local scale per step.
MonotonicityReport fit_min_cbar(const FrequencyProfile& profile,
                                const DiniModulus& f, double K,
                                const std::vector<double>& cbar_grid,
                                double tol = 1e-3,
                                bool allow_hypothesis_violation = false);

/// Geometric default grid {1, 2, 4, ..., 2^max_exp}.
std::vector<double> default_cbar_grid(int max_exp = 10);

struct TwoRadiusCheck {
  double c1_tilde = 0.0, c2_tilde = 0.0;
  double worst_margin = 0.0; // max over pairs of N(r) - C1(N(s)+C2 K); <=0 ok
  bool pass = false;
};

/// N(r) <= C1(N(s) + C2 K) for all grid pairs r < s, with C1 = exp(Cbar F(1))
/// and C2 = Cbar (1 + F(1)) derived from the monotone adjusted map.
TwoRadiusCheck two_radius_check(const FrequencyProfile& profile,
                                const DiniModulus& f, double cbar, double K);

struct PositivityCheck {
  double worst_margin = 0.0; // min over r of I + K r^2 H + tolerance band
  bool pass = false;
};

/// I(r) + K r^2 H(r) >= -(combined error estimate) on every grid radius.
PositivityCheck positivity_check(const FrequencyProfile& profile, double K);

/// Sup of |u| over the closed gauge ball B_r: coarse lattice plus local
/// refinement rounds around the current maxima.
double sup_norm_on_ball(const GaugeGeometry& geom, const ScalarField& u,
                        double r, int coarse_points = 32, int rounds = 3,
                        int keep = 8);

struct OrderEstimate {
  double slope = 0.0;     // fitted d log sup / d log r
  double intercept = 0.0;
  double fit_residual = 0.0; // max |log sup - fit|
  double sqrtK = 1.0;
  double ratio = 0.0;     // slope / sqrt(K)
  std::vector<double> radii;
  std::vector<double> sups;
};

/// Least-squares slope of log sup_{B_r}|u| against log r over the window.
OrderEstimate vanishing_order(const GaugeGeometry& geom,
                              const CatalogEntry& entry,
                              const std::vector<double>& window_radii);

} // namespace freqlab
