#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab {

/// Power series f(rho) = sum_j a_j rho^{2j} solving the gauge-radial ODE
/// f'' + (Q - 1 + 2k)/rho f' = -lambda f, i.e.
/// a_{j+1} = -lambda a_j / ((2j+2)(2j+2k+Q)) with a_0 = 1. The shift k is the
/// degree of an angular polynomial factor (k = 0 is the plain radial case).
class RadialSeries {
public:
  static RadialSeries build(double lambda, int k, int Q, double rho_max,
                            double tol = 1e-12, int max_order = 40);

  double lambda() const { return lambda_; }
  int shift() const { return k_; }
  int order() const { return static_cast<int>(a_.size()) - 1; }
  double coefficient(int j) const { return a_[j]; }
  /// Bound on the dropped tail for rho <= rho_max (alternating series).
  double remainder_bound() const { return remainder_; }

  /// f and derivatives with respect to s = rho^2 (for jet chains).
  void eval_s(double s, double& f, double& dfds, double& ddfds2) const;
  double value_at_rho(double rho) const;

private:
  double lambda_ = 0.0;
  int k_ = 0, Q_ = 0;
  double remainder_ = 0.0;
  std::vector<double> a_;
};

struct Region {
  enum Kind { Ball, Annulus } kind = Ball;
  double a = 0.0; // inner gauge radius (Annulus only)
  double b = 1.0; // outer gauge radius
};

enum class DiscrepancyClass { Zero, Bounded, Unknown };

/// A solution of Delta_H u = V u with known potential class, discrepancy
/// behavior and (when defined) vanishing order; the ground truth objects the
/// frequency laboratory runs on.
struct CatalogEntry {
  std::string id;
  FieldPtr u;
  Potential V; // null field means V == 0
  double K = 1.0 + 1e-6;
  std::optional<double> known_order;
  DiscrepancyClass discrepancy_class = DiscrepancyClass::Unknown;
  Region valid_region;
  /// Eigenvalue for V = -lambda psi entries; for spherical harmonics it holds
  /// the classical pairing lambda_kappa (V is still zero there).
  double lambda = 0.0;
  /// True when V is exactly -lambda psi; integration loops then reuse the
  /// psi value they already computed instead of re-deriving it.
  bool V_is_lambda_psi = false;
};

struct EntryVerification {
  double max_equation_residual = 0.0;  // relative, backward-error normalized
  double max_discrepancy_residual = 0.0;
  PotentialCheck potential;
  int samples = 0;
  bool pass = true;
  std::string detail;
};

/// Residual checks at random valid-region points; every constructor below
/// runs this and throws if it fails.
EntryVerification verify_entry(const GaugeGeometry& geom,
                               const CatalogEntry& entry, int nsamples = 50,
                               std::uint64_t seed = 0x5eed5eedULL,
                               double eq_tol = 1e-8, double disc_tol = 1e-9);

/// u = x_k, y_k, t on a Heisenberg group; all Delta_H-harmonic.
std::vector<CatalogEntry> harmonic_coordinates(const GaugeGeometry& geom);

/// Radial eigensolution u = f(rho), V = -lambda psi, vanishing order 0.
CatalogEntry radial_eigensolution(const GaugeGeometry& geom, double lambda);

/// u = P_k(g) f(rho) with P_k a polyradial delta-homogeneous Delta_H-harmonic
/// polynomial of degree k (k even), f from the shifted recurrence;
/// V = -lambda psi, zero discrepancy, vanishing order k.
CatalogEntry heisenberg_eigenmode(const GaugeGeometry& geom, int k,
                                  double lambda);

/// u = rho^{2-Q} on an annulus; singular-behavior stress tests only.
CatalogEntry fundamental_solution_entry(const GaugeGeometry& geom,
                                        double a = 0.2, double b = 1.0);

/// u = Re(x_1 + i x_2)^kappa, V == 0, paired with lambda_kappa =
/// kappa(kappa + n - 2) for the sharpness narrative.
CatalogEntry euclidean_spherical_harmonic(const GaugeGeometry& geom, int kappa);

/// The polyradial solid harmonic P_k itself (exposed for tests).
Polynomial heisenberg_solid_harmonic(const GaugeGeometry& geom, int k);

/// Resolves ids like "heisenberg1/radial-eig?lambda=16",
/// "euclidean3/sph-harm?kappa=4", "heisenberg1/coord?axis=t",
/// "heisenberg1/eigenmode?k=4&lambda=16", "heisenberg1/fundsol?a=0.2&b=1".
CatalogEntry catalog_entry_from_id(const GaugeGeometry& geom,
                                   const std::string& id);

} // namespace freqlab
