#pragma once

#include <functional>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab {

/// Tensor-midpoint quadrature spec over the anisotropic bounding box of a
/// gauge ball (stratum-j axes get half-width kappa_j r^j from the geometry).
struct QuadratureSpec {
  int points_per_axis = 64;
  /// Optional per-stratum override; index j-1 holds stratum j's resolution.
  std::vector<int> per_stratum_points;
  enum class Rule { Midpoint, Richardson } rule = Rule::Midpoint;
  int threads = 0;

  int resolution_for_stratum(int s) const {
    if (!per_stratum_points.empty() &&
        s - 1 < static_cast<int>(per_stratum_points.size()))
      return per_stratum_points[s - 1];
    return points_per_axis;
  }
  QuadratureSpec with_points(int n) const {
    QuadratureSpec s = *this;
    s.points_per_axis = n;
    s.per_stratum_points.clear();
    return s;
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0; // |full - halved resolution|
  long nodes_used = 0;
};

using Integrand = std::function<double(const Vec&)>;

/// integral over B_r of phi * (r^2 - rho^2)^beta dg; Haar measure is Lebesgue
/// in exponential coordinates. Throws a Singular error on a nonfinite phi at
/// an interior node (use the annulus variant for singular integrands).
QuadratureResult integrate_ball(const GaugeGeometry& geom, const Integrand& phi,
                                double r, double beta,
                                const QuadratureSpec& spec);

/// Same rule with indicator a < rho < b and weight (b^2 - rho^2)^beta.
QuadratureResult integrate_annulus(const GaugeGeometry& geom,
                                   const Integrand& phi, double a, double b,
                                   double beta, const QuadratureSpec& spec);

// ---------------------------------------------------------------------------
// Multi-component kernel: evaluates several integrands in one sweep so the
// frequency profile pays for one field jet per node. Component c carries
// weight (r^2 - rho^2)^(beta_base + beta_offsets[c]).
// ---------------------------------------------------------------------------

/// Fills vals[0..ncomp) at a node; receives rho^2 to avoid recomputation.
using MultiIntegrand = std::function<void(const Vec& x, double rho2, double* vals)>;

struct MultiResult {
  std::vector<double> value;
  std::vector<double> error_estimate;
  std::vector<double> coarse; // halved-resolution values (stability fits)
  long nodes_used = 0;
};

MultiResult integrate_ball_multi(const GaugeGeometry& geom, int ncomp,
                                 const MultiIntegrand& fn, double r,
                                 double beta_base,
                                 const std::vector<int>& beta_offsets,
                                 const QuadratureSpec& spec);

struct ConvergenceRow {
  int points = 0;
  double value = 0.0;
  double delta = 0.0;      // value - previous value
  double est_order = 0.0;  // from successive deltas (0 where undefined)
};

/// Empirical convergence study at increasing resolutions (>= 3 required).
std::vector<ConvergenceRow> convergence_study(const GaugeGeometry& geom,
                                              const Integrand& phi, double r,
                                              double beta,
                                              const std::vector<int>& resolutions,
                                              const QuadratureSpec& spec = {});

} // namespace freqlab
