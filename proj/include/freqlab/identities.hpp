#pragma once

#include <string>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab {

struct IdentityResult {
  std::string name;
  double worst = 0.0; // worst relative (or absolute-on-O(1)) error observed
  double tol = 0.0;
  bool pass = false;
};

/// The structural identity suite: algebra validation, Z rho = rho, Z psi = 0,
/// Z Gamma = (2-Q) Gamma, div Z = Q, div X_i = 0, [X_i,Z] = X_i on polynomial
/// fields, dilation measure scaling, unit Haar translation Jacobian, gauge
/// homogeneity, psi dilation invariance, and the gauge harmonicity oracle
/// Delta_H rho^{2-Q} = 0 that gates every downstream experiment.
std::vector<IdentityResult> run_identity_suite(const GaugeGeometry& geom,
                                               int npoints = 100,
                                               std::uint64_t seed = 0x1dece5);

inline bool all_pass(const std::vector<IdentityResult>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

} // namespace freqlab
