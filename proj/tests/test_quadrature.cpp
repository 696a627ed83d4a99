#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <limits>

#include "freqlab/errors.hpp"
#include "freqlab/quadrature.hpp"
#include "support.hpp"

using namespace freqlab;
using namespace freqlab::testsup;

namespace {
const Integrand kOne = [](const Vec&) { return 1.0; };
}

TEST_CASE("disk area to 1e-3 at N=256") {
  const auto geom = GaugeGeometry::euclidean(2);
  QuadratureSpec spec;
  spec.points_per_axis = 256;
  const auto q = integrate_ball(geom, kOne, 1.0, 0.0, spec);
  CHECK(rel_err(q.value, M_PI) < 1e-3);
  CHECK(q.error_estimate >= 0.0);
  CHECK(q.nodes_used > 0);
}

TEST_CASE("heisenberg ball volume scales like r^Q") {
  const auto geom = GaugeGeometry::heisenberg(1);
  QuadratureSpec spec;
  spec.points_per_axis = 64;
  const auto b1 = integrate_ball(geom, kOne, 0.5, 0.0, spec);
  const auto b2 = integrate_ball(geom, kOne, 1.0, 0.0, spec);
  CHECK(rel_err(b2.value / b1.value, 16.0) < 1e-3); // 2^Q, Q=4
}

TEST_CASE("weighted height scales like r^{Q+2alpha}") {
  // phi = u^2 psi with u == 1, alpha = 1: H(r)/r^{Q+2} constant across radii.
  const auto geom = GaugeGeometry::heisenberg(1);
  QuadratureSpec spec;
  spec.points_per_axis = 64;
  const Integrand psi = [&geom](const Vec& x) { return geom.psi(x); };
  const auto a = integrate_ball(geom, psi, 0.4, 1.0, spec);
  const auto b = integrate_ball(geom, psi, 0.8, 1.0, spec);
  const int expo = geom.Q() + 2;
  CHECK(rel_err(a.value / std::pow(0.4, expo), b.value / std::pow(0.8, expo)) <
        1e-3);
}

TEST_CASE("beta-weight oracle for Euclidean balls") {
  const auto geom = GaugeGeometry::euclidean(2);
  QuadratureSpec spec;
  spec.points_per_axis = 192;
  // integral of (1-rho^2) over the unit disk = pi/2
  const auto q = integrate_ball(geom, kOne, 1.0, 1.0, spec);
  CHECK(rel_err(q.value, beta_ball_weight(2, 1.0)) < 1e-3);
  CHECK(std::abs(beta_ball_weight(2, 1.0) - M_PI / 2.0) < 1e-12);
}

TEST_CASE("annulus: area, additivity, and singular integrands") {
  const auto geom = GaugeGeometry::euclidean(2);
  QuadratureSpec spec;
  spec.points_per_axis = 256;
  const auto ann = integrate_annulus(geom, kOne, 0.5, 1.0, 0.0, spec);
  CHECK(rel_err(ann.value, M_PI * 0.75) < 1e-3);

  // additivity at beta = 0
  const auto ball_a = integrate_ball(geom, kOne, 0.5, 0.0, spec);
  const auto ball_b = integrate_ball(geom, kOne, 1.0, 0.0, spec);
  CHECK(std::abs(ball_b.value - (ball_a.value + ann.value)) <=
        3.0 * (ball_a.error_estimate + ball_b.error_estimate +
               ann.error_estimate) +
            1e-6);

  CHECK_THROWS_AS(integrate_annulus(geom, kOne, 0.7, 0.7, 0.0, spec), Error);
  CHECK_THROWS_AS(integrate_annulus(geom, kOne, 0.9, 0.2, 0.0, spec), Error);
}

TEST_CASE("gamma stress integrand is finite on an annulus and refines") {
  const auto geom = GaugeGeometry::heisenberg(1);
  const FieldPtr gamma = geom.gamma_field();
  const Integrand phi = [&gamma](const Vec& x) { return gamma->value(x); };
  double prev_est = std::numeric_limits<double>::infinity();
  for (int n : {32, 64, 128}) {
    QuadratureSpec spec;
    spec.points_per_axis = n;
    const auto q = integrate_annulus(geom, phi, 0.2, 1.0, 0.0, spec);
    CHECK(std::isfinite(q.value));
    CHECK(q.error_estimate < prev_est * 1.5);
    prev_est = q.error_estimate;
  }
}

TEST_CASE("nonfinite interior integrand raises the singular error") {
  const auto geom = GaugeGeometry::euclidean(2);
  QuadratureSpec spec;
  spec.points_per_axis = 32;
  const Integrand blows = [](const Vec& x) {
    return std::abs(x[0]) < 0.5 ? std::numeric_limits<double>::infinity() : 1.0;
  };
  try {
    integrate_ball(geom, blows, 1.0, 0.0, spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("convergence study orders") {
  // Pairwise delta ratios oscillate with the indicator alignment, so judge
  // the aggregate order across the whole ladder (first delta to last delta).
  auto aggregate_order = [](const std::vector<ConvergenceRow>& rows) {
    const double d0 = std::abs(rows[1].delta);
    const double d1 = std::abs(rows.back().delta);
    const double nr = double(rows.back().points) / rows[1].points;
    return std::log(d0 / d1) / std::log(nr);
  };

  const auto geom = GaugeGeometry::euclidean(2);
  // smooth phi with a vanishing boundary weight: order >= 1.5
  const Integrand smooth = [](const Vec& x) {
    return 1.0 + x[0] * x[0] + 0.3 * x[1];
  };
  const auto rows =
      convergence_study(geom, smooth, 0.9, 1.0, {32, 64, 128, 256, 512});
  CHECK(rows.size() == 5);
  CHECK(aggregate_order(rows) >= 1.5);
  CHECK(rows[2].est_order != 0.0); // per-row Richardson ratios are reported

  // indicator-limited case converges, but slower than the weighted one
  const auto rough =
      convergence_study(geom, kOne, 0.9, 0.0, {32, 64, 128, 256, 512});
  const double rough_order = aggregate_order(rough);
  CHECK(rough_order > 0.5);
  CHECK(rough_order < 3.5);

  CHECK_THROWS_AS(convergence_study(geom, kOne, 0.9, 0.0, {32, 64}), Error);
}

TEST_CASE("dilation covariance of homogeneous integrands") {
  const auto geom = GaugeGeometry::heisenberg(1);
  QuadratureSpec spec;
  spec.points_per_axis = 96;
  // phi = rho^2 (homogeneous of degree 2), beta = 1:
  // I(r) = lambda^{Q+2beta+2} I(r/lambda)
  const Integrand phi = [&geom](const Vec& x) {
    const double r4 = geom.gauge4(x);
    return std::sqrt(r4);
  };
  const double lambda = 2.0;
  const auto big = integrate_ball(geom, phi, 0.8, 1.0, spec);
  const auto small = integrate_ball(geom, phi, 0.4, 1.0, spec);
  const double predicted = std::pow(lambda, geom.Q() + 2 + 2) * small.value;
  CHECK(std::abs(big.value - predicted) <=
        3.0 * (big.error_estimate +
               std::pow(lambda, geom.Q() + 4) * small.error_estimate) +
            1e-9);
}

TEST_CASE("error estimates are honest against closed forms") {
  // 20 Euclidean cases with Beta-moment values; true error <= 3x estimate in
  // at least 90% of them.
  int honest = 0, total = 0;
  for (int n : {2, 3}) {
    const auto geom = GaugeGeometry::euclidean(n);
    for (double alpha : {0.0, 1.0}) {
      for (int m : {0, 1}) {
        for (int pts : {48, 64, 96}) {
          if (total >= 20) break;
          QuadratureSpec spec;
          spec.points_per_axis = pts;
          const Integrand phi = [m](const Vec& x) {
            double r2 = norm2(x);
            return m == 0 ? 1.0 : r2;
          };
          const auto q = integrate_ball(geom, phi, 1.0, alpha, spec);
          const double want = m == 0 ? beta_ball_weight(n, alpha)
                                     : beta_ball_radial_moment(n, 1, alpha);
          const double true_err = std::abs(q.value - want);
          ++total;
          if (true_err <= 3.0 * q.error_estimate + 1e-12) ++honest;
        }
      }
    }
  }
  CHECK(total >= 20);
  CHECK(honest * 10 >= total * 9);
}

TEST_CASE("multi-component kernel is bit-identical to single calls") {
  const auto geom = GaugeGeometry::heisenberg(1);
  QuadratureSpec spec;
  spec.points_per_axis = 48;
  const Integrand f0 = [&geom](const Vec& x) { return geom.psi(x); };
  const Integrand f1 = [](const Vec& x) { return x[0] * x[0]; };
  const auto s0 = integrate_ball(geom, f0, 0.7, 1.0, spec);
  const auto s1 = integrate_ball(geom, f1, 0.7, 2.0, spec);
  const auto multi = integrate_ball_multi(
      geom, 2,
      [&geom](const Vec& x, double, double* vals) {
        vals[0] = geom.psi(x);
        vals[1] = x[0] * x[0];
      },
      0.7, 1.0, {0, 1}, spec);
  CHECK(multi.value[0] == s0.value);
  CHECK(multi.value[1] == s1.value);
  CHECK(multi.error_estimate[0] == s0.error_estimate);
}

TEST_CASE("results are identical across worker counts") {
  const auto geom = GaugeGeometry::heisenberg(1);
  const Integrand phi = [&geom](const Vec& x) {
    return geom.psi(x) * (1.0 + x[2]);
  };
  QuadratureSpec one;
  one.points_per_axis = 48;
  one.threads = 1;
  QuadratureSpec four = one;
  four.threads = 4;
  const auto a = integrate_ball(geom, phi, 0.8, 1.0, one);
  const auto b = integrate_ball(geom, phi, 0.8, 1.0, four);
  CHECK(a.value == b.value); // bitwise
  CHECK(a.error_estimate == b.error_estimate);
}

TEST_CASE("richardson rule applies the two-level extrapolation formula") {
  const auto geom = GaugeGeometry::euclidean(2);
  QuadratureSpec mid;
  mid.points_per_axis = 96;
  QuadratureSpec rich = mid;
  rich.rule = QuadratureSpec::Rule::Richardson;
  const Integrand smooth = [](const Vec& x) { return 1.0 + x[0] * x[0]; };
  const auto m = integrate_ball_multi(
      geom, 1, [](const Vec& x, double, double* v) { v[0] = 1.0 + x[0] * x[0]; },
      0.9, 2.0, {0}, mid);
  const auto qr = integrate_ball(geom, smooth, 0.9, 2.0, rich);
  const double extrapolated = m.value[0] + (m.value[0] - m.coarse[0]) / 3.0;
  CHECK(qr.value == doctest::Approx(extrapolated).epsilon(1e-15));
  CHECK(qr.error_estimate == doctest::Approx(std::abs(m.value[0] - m.coarse[0])));
}
