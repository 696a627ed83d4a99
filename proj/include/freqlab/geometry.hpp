#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "freqlab/algebra.hpp"
#include "freqlab/field.hpp"
#include "freqlab/jet.hpp"

namespace freqlab {

enum class GaugeKind { Euclidean, Heisenberg };

/// Dini modulus family f(t) = kappa * t^beta with closed-form primitive
/// F(r) = integral_0^r f(t)/t dt = kappa r^beta / beta.
struct DiniModulus {
  double kappa = 1.0;
  double beta = 1.0;

  DiniModulus(double k, double b);
  double f(double t) const { return kappa * std::pow(t, beta); }
  double primitive(double r) const { return kappa * std::pow(r, beta) / beta; }
  double K0() const { return kappa / beta; } // bounds int_0^1 f/t
  double K1() const { return kappa; }        // bounds sup f on (0,1)
};

/// Potential V with its claimed admissibility constant K > 1 for
/// |V| <= K psi and |ZV| <= K psi.
struct Potential {
  FieldPtr field; // null means V == 0
  double K = 1.0 + 1e-6;

  Potential() = default;
  Potential(FieldPtr f, double claimed_K);
  bool is_zero() const { return field == nullptr; }
  double value(const Vec& x) const { return field ? field->value(x) : 0.0; }
};

struct PotentialCheck {
  double max_V_ratio = 0.0;  // max |V|/psi over samples
  double max_ZV_ratio = 0.0; // max |ZV|/psi over samples
  int samples_used = 0;
  bool passes(double K) const {
    const double slack = 1.0 + 1e-9;
    return max_V_ratio <= K * slack && max_ZV_ratio <= K * slack;
  }
};

/// Gauge geometry on Euclidean space or a Heisenberg group: the gauge rho,
/// the weight psi = |grad_H rho|^2, the dilation generator Z, horizontal
/// calculus and the discrepancy E_u.
///
/// The Heisenberg gauge is rho = (|z|^4 + c t^2)^{1/4} with c = 16/b^2 tied
/// to the bracket normalization [e_i, e_{n+i}] = b e_{2n+1}; c is the unique
/// constant making rho^{2-Q} harmonic for the induced left-invariant frame,
/// and the harmonicity oracle in the identity suite guards it at run time.
class GaugeGeometry {
public:
  static GaugeGeometry euclidean(int n);
  static GaugeGeometry heisenberg(int n);
  static GaugeGeometry from_algebra(StratifiedAlgebra alg);
  /// "euclidean:n" or "heisenberg:n".
  static GaugeGeometry from_id(const std::string& id);

  const StratifiedAlgebra& algebra() const { return *alg_; }
  GaugeKind kind() const { return kind_; }
  int dim() const { return n_; }
  int hdim() const { return m_; }
  int Q() const { return Q_; }
  double gauge_quartic_constant() const { return c_; }
  std::string id() const { return alg_->id(); }

  // -- gauge ------------------------------------------------------------
  double gauge(const Vec& x) const;
  Jet gauge_jet(const Vec& x) const;     // ord 2, x != e
  Jet gauge_sq_jet(const Vec& x) const;  // jet of rho^2, x != e
  /// Fourth power of the gauge; polynomial, defined everywhere.
  double gauge4(const Vec& x) const;
  /// Coordinate gradient of rho given rho itself (hot-loop path; x != e).
  void gauge_grad(const Vec& x, double rho, Vec& grad) const;

  // -- weight psi = |grad_H rho|^2 ---------------------------------------
  double psi(const Vec& x) const;
  /// Value and full coordinate gradient of psi (needs rho's 2-jet).
  void psi_with_grad(const Vec& x, double& value, Vec& grad) const;
  /// psi as a ScalarField of jet order 1.
  FieldPtr psi_field() const;

  // -- generator Z --------------------------------------------------------
  /// Zu(x) from u's 1-jet: sum_k w_k x_k du/dx_k.
  double apply_Z(const Jet& u, const Vec& x) const;
  double Z_psi(const Vec& x) const;
  /// Coordinate weight (stratum) of axis k.
  int weight(int k) const { return alg_->stratum(k); }

  // -- horizontal calculus -------------------------------------------------
  /// Fills A[i*dim+k] = a^i_k(x), the coefficients of X_i at x.
  void horizontal_frame(const Vec& x, double* A) const;
  /// X_i u for i = 0..m-1 from u's 1-jet.
  void horizontal_gradient(const Jet& u, const Vec& x, double* Xu) const;
  double horizontal_gradient_sq(const Jet& u, const Vec& x) const;
  /// Delta_H u from u's 2-jet.
  double sublaplacian(const Jet& u, const Vec& x) const;
  /// Delta_H u together with the sum of |term| actually accumulated, the
  /// natural scale for backward-error style residuals.
  void sublaplacian_with_scale(const Jet& u, const Vec& x, double& value,
                               double& scale) const;

  /// div X_i and div Z as exact polynomials (for the identity suite).
  Polynomial divergence_X(int i) const;
  double divergence_Z() const { return static_cast<double>(Q_); }

  /// ([X_i, Z] - X_i) u at x, zero in exact arithmetic.
  double commutator_XZ_defect(const Jet& u, const Vec& x, int i) const;

  /// Coefficient polynomials of X_i (shared with the solver's stencil).
  const std::vector<Polynomial>& field_polys(int i) const {
    return xpolys_[i];
  }

  // -- discrepancy and potential checks -------------------------------------
  /// E_u = <grad_H u, grad_H rho> - (Zu/rho) psi at x != e.
  double discrepancy(const Jet& u, const Vec& x) const;
  double discrepancy(const ScalarField& u, const Vec& x) const;
  /// Size of the terms combined in E_u, for relative residuals.
  void discrepancy_with_scale(const Jet& u, const Vec& x, double& value,
                              double& scale) const;

  PotentialCheck check_potential(const Potential& V,
                                 const std::vector<Vec>& samples,
                                 double psi_floor = 1e-8) const;

  /// Worst ratio |E_u| rho / (f(rho) psi |u|) over the samples; <= 1
  /// certifies the discrepancy growth hypothesis on the sample set.
  double check_discrepancy_bound(const ScalarField& u, const DiniModulus& f,
                                 const std::vector<Vec>& samples,
                                 double floor = 1e-8) const;

  /// V(g) = Vtilde(g) * cut(rho(g) psi(g)); refuses cuts whose support
  /// touches 0. K is measured on the samples (with margin) and checked.
  Potential make_cutoff_potential(FieldPtr vtilde, double support_lo,
                                  double support_hi,
                                  const std::vector<Vec>& samples) const;

  // -- fields -------------------------------------------------------------
  FieldPtr gauge_field() const;              // rho
  FieldPtr rho_power_field(double p) const;  // rho^p
  FieldPtr gamma_field() const;              // rho^{2-Q}

  /// Bounding-box half-width per axis for the gauge ball B_r.
  Vec ball_box_halfwidths(double r) const;

private:
  explicit GaugeGeometry(StratifiedAlgebra alg);

  std::shared_ptr<const StratifiedAlgebra> alg_;
  GaugeKind kind_;
  int n_, m_, Q_;
  double c_ = 1.0; // quartic gauge constant (Heisenberg)
  int nz_ = 0;     // 2n for H^n

  std::vector<std::vector<Polynomial>> xpolys_;   // [i][k]
  std::vector<std::vector<CompiledPoly>> xc_;     // compiled a^i_k
  std::vector<CompiledPoly> driftc_;              // b_l = sum_i,k a^i_k d_k a^i_l
  bool drift_zero_ = true;
};

/// Uniform random point with gauge radius in [a, b] (rejection sampling in
/// the bounding box; a may be 0 to sample a ball).
Vec random_gauge_point(const GaugeGeometry& geom, std::mt19937_64& rng,
                       double a, double b);

} // namespace freqlab
