#include "freqlab/identities.hpp"

#include <cmath>

namespace freqlab {

namespace {

double rel(double got, double want) {
  return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1.0e-30});
}

// Determinant by Gaussian elimination (tiny matrices).
double det(std::vector<std::vector<double>> m) {
  const int n = static_cast<int>(m.size());
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int cc = c; cc < n; ++cc) m[r][cc] -= f * m[c][cc];
    }
  }
  return d;
}

std::vector<Polynomial> test_polynomials(int n) {
  std::vector<Polynomial> ps;
  auto X = [&](int i) { return Polynomial::coordinate(n, i); };
  ps.push_back(X(0) * X(0));
  ps.push_back(X(0) * X(n - 1));
  ps.push_back(X(n - 1) * X(n - 1));
  if (n >= 2) ps.push_back(X(0) * X(1) + X(1) * 2.0);
  if (n >= 3) ps.push_back(X(0) * X(1) * X(2) + X(2) * X(2));
  return ps;
}

} // namespace

std::vector<IdentityResult> run_identity_suite(const GaugeGeometry& geom,
                                               int npoints,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const StratifiedAlgebra& alg = geom.algebra();
  const int n = geom.dim();
  const int Q = geom.Q();

  std::vector<Vec> pts;
  for (int i = 0; i < npoints; ++i)
    pts.push_back(random_gauge_point(geom, rng, 0.05, 0.95));
  std::uniform_real_distribution<double> lam(0.5, 2.0);

  std::vector<IdentityResult> out;
  auto add = [&](const std::string& name, double worst, double tol) {
    out.push_back({name, worst, tol, worst <= tol});
  };

  add("validate_algebra", validate_algebra(alg).ok() ? 0.0 : 1.0, 0.5);

  {
    double worst = 0.0;
    for (const Vec& x : pts) {
      const Jet rho = geom.gauge_jet(x);
      worst = std::max(worst, rel(geom.apply_Z(rho, x), rho.v));
    }
    add("Z_rho_eq_rho", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (const Vec& x : pts) worst = std::max(worst, std::abs(geom.Z_psi(x)));
    add("Z_psi_eq_zero", worst, 1e-8);
  }
  if (Q > 2) {
    const FieldPtr gamma = geom.gamma_field();
    double worst = 0.0;
    for (const Vec& x : pts) {
      const Jet gj = gamma->jet(x);
      worst = std::max(worst, rel(geom.apply_Z(gj, x), (2.0 - Q) * gj.v));
    }
    add("Z_Gamma_eq_2mQ_Gamma", worst, 1e-8);
  }
  add("div_Z_eq_Q", std::abs(geom.divergence_Z() - Q), 1e-12);
  {
    double worst = 0.0;
    for (int i = 0; i < geom.hdim(); ++i) {
      const Polynomial d = geom.divergence_X(i);
      for (const Vec& x : pts) worst = std::max(worst, std::abs(d.eval(x)));
    }
    add("div_Xi_eq_zero", worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (const Polynomial& p : test_polynomials(n)) {
      PolynomialField f(p);
      for (const Vec& x : pts) {
        const Jet uj = f.jet(x);
        for (int i = 0; i < geom.hdim(); ++i) {
          const double defect = geom.commutator_XZ_defect(uj, x, i);
          worst = std::max(worst, std::abs(defect) / (1.0 + max_abs(x)));
        }
      }
    }
    add("commutator_XiZ_eq_Xi", worst, 1e-8);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double l = lam(rng);
      double jac = 1.0;
      for (int k = 0; k < n; ++k)
        for (int s = 0; s < geom.weight(k); ++s) jac *= l;
      worst = std::max(worst, rel(jac, std::pow(l, Q)));
    }
    add("dilation_measure_lambdaQ", worst, 1e-8);
  }
  {
    // Left translation preserves Lebesgue measure: FD Jacobian of y -> g*y.
    double worst = 0.0;
    const double h = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
      const Vec g = pts[trial % pts.size()];
      const Vec y = pts[(trial + 7) % pts.size()];
      std::vector<std::vector<double>> J(n, std::vector<double>(n));
      for (int col = 0; col < n; ++col) {
        Vec yp = y, ym = y;
        yp.a[col] += h;
        ym.a[col] -= h;
        const Vec up = bch_product(alg, g, yp);
        const Vec um = bch_product(alg, g, ym);
        for (int row = 0; row < n; ++row)
          J[row][col] = (up.a[row] - um.a[row]) / (2.0 * h);
      }
      worst = std::max(worst, std::abs(det(J) - 1.0));
    }
    add("haar_translation_jacobian", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vec& x = pts[i % pts.size()];
      const double l = lam(rng);
      const Vec xd = dilate(alg, x, l);
      worst = std::max(worst, rel(geom.gauge(xd), l * geom.gauge(x)));
      worst = std::max(worst, std::abs(geom.psi(xd) - geom.psi(x)));
    }
    add("gauge_homogeneity_and_psi_invariance", worst, 1e-8);
  }
  if (Q > 2) {
    // The oracle that validates the gauge constant before any experiment.
    std::mt19937_64 orng(seed ^ 0x9e3779b97f4a7c15ULL);
    const FieldPtr gamma = geom.gamma_field();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vec x = random_gauge_point(geom, orng, 0.2, 1.0);
      double lap, scale;
      geom.sublaplacian_with_scale(gamma->jet(x), x, lap, scale);
      worst = std::max(worst, std::abs(lap) / std::max(scale, 1e-30));
    }
    add("gauge_harmonicity_oracle", worst, 1e-8);
  }
  return out;
}

} // namespace freqlab
