#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "freqlab/geometry.hpp"

namespace freqlab::testsup {

inline std::vector<Vec> sample_annulus(const GaugeGeometry& geom, double a,
                                       double b, int count,
                                       std::uint64_t seed = 0xfeedULL) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i)
    pts.push_back(random_gauge_point(geom, rng, a, b));
  return pts;
}

/// integral over the Euclidean unit ball of (1-|x|^2)^alpha dx.
inline double beta_ball_weight(int n, double alpha) {
  return std::pow(M_PI, n / 2.0) *
         std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.0 + n / 2.0));
}

/// integral over the unit ball of |x|^{2m} (1-|x|^2)^alpha dx.
inline double beta_ball_radial_moment(int n, int m, double alpha) {
  // surface measure * (1/2) B(n/2+m, alpha+1)
  const double wn = 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
  return wn * 0.5 *
         std::exp(std::lgamma(n / 2.0 + m) + std::lgamma(alpha + 1.0) -
                  std::lgamma(n / 2.0 + m + alpha + 1.0));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) /
         std::max({std::abs(got), std::abs(want), 1e-300});
}

} // namespace freqlab::testsup
