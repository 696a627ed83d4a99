#include "freqlab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "freqlab/errors.hpp"

namespace freqlab {

DiniModulus::DiniModulus(double k, double b) : kappa(k), beta(b) {
  if (!(kappa > 0.0))
    fail(ErrorKind::Domain, "Dini modulus amplitude must be positive");
  if (!(beta > 0.0) || beta > 1.0)
    fail(ErrorKind::Domain, "Dini modulus exponent must lie in (0,1]");
}

Potential::Potential(FieldPtr f, double claimed_K)
    : field(std::move(f)), K(claimed_K) {
  if (!(K > 1.0))
    fail(ErrorKind::Domain, "potential constant K must exceed 1");
}

namespace {

bool is_heisenberg_pattern(const StratifiedAlgebra& alg, double& b_out) {
  if (alg.step() != 2) return false;
  if (alg.strata_dims()[1] != 1) return false;
  const int m = alg.strata_dims()[0];
  if (m % 2 != 0) return false;
  const int n = m / 2;
  const int t = 2 * n;
  const double b = alg.c(0, n, t);
  if (b == 0.0) return false;
  for (int i = 0; i < t + 1; ++i)
    for (int j = 0; j < t + 1; ++j)
      for (int k = 0; k < t + 1; ++k) {
        double expect = 0.0;
        if (k == t && j == i + n && i < n) expect = b;
        if (k == t && i == j + n && j < n) expect = -b;
        if (alg.c(i, j, k) != expect) return false;
      }
  b_out = b;
  return true;
}

} // namespace

GaugeGeometry::GaugeGeometry(StratifiedAlgebra alg)
    : alg_(std::make_shared<const StratifiedAlgebra>(std::move(alg))) {
  n_ = alg_->dim();
  m_ = alg_->horizontal_dim();
  Q_ = homogeneous_dimension(*alg_);
  if (alg_->step() == 1) {
    kind_ = GaugeKind::Euclidean;
  } else {
    double b = 0.0;
    if (!is_heisenberg_pattern(*alg_, b))
      fail(ErrorKind::Unsupported,
           "no closed-form gauge for this algebra (only step-1 and "
           "Heisenberg groups are supported)");
    kind_ = GaugeKind::Heisenberg;
    nz_ = m_;
    // Unique constant making rho^{2-Q} harmonic for the frame induced by
    // [e_i, e_{n+i}] = b e_{2n+1}; the identity suite re-verifies it.
    c_ = 16.0 / (b * b);
  }

  xpolys_.resize(m_);
  xc_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    xpolys_[i] = left_invariant_field_polys(*alg_, i);
    for (int k = 0; k < n_; ++k) xc_[i].emplace_back(xpolys_[i][k]);
  }
  // Drift b_l = sum_i sum_k a^i_k d_k a^i_l, the first-order part of Delta_H.
  for (int l = 0; l < n_; ++l) {
    Polynomial bl(n_);
    for (int i = 0; i < m_; ++i)
      for (int k = 0; k < n_; ++k) {
        if (xpolys_[i][k].is_zero()) continue;
        bl = bl + xpolys_[i][k] * xpolys_[i][l].derivative(k);
      }
    if (!bl.is_zero()) drift_zero_ = false;
    driftc_.emplace_back(bl);
  }
}

GaugeGeometry GaugeGeometry::euclidean(int n) {
  return GaugeGeometry(StratifiedAlgebra::euclidean(n));
}
GaugeGeometry GaugeGeometry::heisenberg(int n) {
  return GaugeGeometry(StratifiedAlgebra::heisenberg(n));
}
GaugeGeometry GaugeGeometry::from_algebra(StratifiedAlgebra alg) {
  return GaugeGeometry(std::move(alg));
}
GaugeGeometry GaugeGeometry::from_id(const std::string& id) {
  return GaugeGeometry(StratifiedAlgebra::from_id(id));
}

// ---------------------------------------------------------------------------
// Gauge
// ---------------------------------------------------------------------------

double GaugeGeometry::gauge4(const Vec& x) const {
  if (kind_ == GaugeKind::Euclidean) {
    const double s2 = norm2(x);
    return s2 * s2;
  }
  double s2 = 0.0;
  for (int i = 0; i < nz_; ++i) s2 += x.a[i] * x.a[i];
  const double t = x.a[nz_];
  return s2 * s2 + c_ * t * t;
}

double GaugeGeometry::gauge(const Vec& x) const {
  if (kind_ == GaugeKind::Euclidean) return norm(x);
  return std::pow(gauge4(x), 0.25);
}

namespace {

// Jet of |z|^2 summed over the first nz coordinates (all of them in the
// Euclidean case).
Jet square_sum_jet(const Vec& x, int n, int nz) {
  Jet j;
  j.n = n;
  double s = 0.0;
  for (int i = 0; i < nz; ++i) {
    s += x.a[i] * x.a[i];
    j.d[i] = 2.0 * x.a[i];
    j.h(i, i) = 2.0;
  }
  j.v = s;
  return j;
}

} // namespace

Jet GaugeGeometry::gauge_sq_jet(const Vec& x) const {
  if (kind_ == GaugeKind::Euclidean) return square_sum_jet(x, n_, n_);
  // q = (|z|^2)^2 + c t^2, rho^2 = sqrt(q); jet of q assembled directly.
  Jet q;
  q.n = n_;
  double s2 = 0.0;
  for (int i = 0; i < nz_; ++i) s2 += x.a[i] * x.a[i];
  const double t = x.a[nz_];
  q.v = s2 * s2 + c_ * t * t;
  if (q.v <= 0.0)
    fail(ErrorKind::Domain, "gauge jet undefined at the identity");
  for (int i = 0; i < nz_; ++i) q.d[i] = 4.0 * x.a[i] * s2;
  q.d[nz_] = 2.0 * c_ * t;
  for (int i = 0; i < nz_; ++i) {
    for (int j = 0; j < nz_; ++j) q.h(i, j) = 8.0 * x.a[i] * x.a[j];
    q.h(i, i) += 4.0 * s2;
  }
  q.h(nz_, nz_) = 2.0 * c_;
  return jet_sqrt(q);
}

void GaugeGeometry::gauge_grad(const Vec& x, double rho, Vec& grad) const {
  grad = Vec(n_);
  if (kind_ == GaugeKind::Euclidean) {
    const double inv = 1.0 / rho;
    for (int i = 0; i < n_; ++i) grad.a[i] = x.a[i] * inv;
    return;
  }
  // q = rho^4, grad rho = grad q / (4 rho^3)
  double s2 = 0.0;
  for (int i = 0; i < nz_; ++i) s2 += x.a[i] * x.a[i];
  const double inv = 1.0 / (4.0 * rho * rho * rho);
  for (int i = 0; i < nz_; ++i) grad.a[i] = 4.0 * x.a[i] * s2 * inv;
  grad.a[nz_] = 2.0 * c_ * x.a[nz_] * inv;
}

Jet GaugeGeometry::gauge_jet(const Vec& x) const {
  if (kind_ == GaugeKind::Euclidean) {
    Jet s2 = square_sum_jet(x, n_, n_);
    if (s2.v <= 0.0)
      fail(ErrorKind::Domain, "gauge jet undefined at the identity");
    return jet_sqrt(s2);
  }
  return jet_sqrt(gauge_sq_jet(x));
}

// ---------------------------------------------------------------------------
// Horizontal calculus
// ---------------------------------------------------------------------------

void GaugeGeometry::horizontal_frame(const Vec& x, double* A) const {
  for (int i = 0; i < m_; ++i)
    for (int k = 0; k < n_; ++k)
      A[i * n_ + k] = xc_[i][k].empty() ? 0.0 : xc_[i][k].eval(x);
}

void GaugeGeometry::horizontal_gradient(const Jet& u, const Vec& x,
                                        double* Xu) const {
  double A[kMaxDim * kMaxDim];
  horizontal_frame(x, A);
  for (int i = 0; i < m_; ++i) {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += A[i * n_ + k] * u.d[k];
    Xu[i] = s;
  }
}

double GaugeGeometry::horizontal_gradient_sq(const Jet& u, const Vec& x) const {
  double Xu[kMaxDim];
  horizontal_gradient(u, x, Xu);
  double s = 0.0;
  for (int i = 0; i < m_; ++i) s += Xu[i] * Xu[i];
  return s;
}

void GaugeGeometry::sublaplacian_with_scale(const Jet& u, const Vec& x,
                                            double& value,
                                            double& scale) const {
  u.require_order(2, "sublaplacian");
  double A[kMaxDim * kMaxDim];
  horizontal_frame(x, A);
  double v = 0.0, s = 0.0;
  for (int i = 0; i < m_; ++i) {
    double term = 0.0, mag = 0.0;
    const double* ai = A + i * n_;
    for (int k = 0; k < n_; ++k) {
      if (ai[k] == 0.0) continue;
      for (int l = 0; l < n_; ++l) {
        const double c = ai[k] * ai[l] * u.h(k, l);
        term += c;
        mag += std::abs(c);
      }
    }
    v += term;
    s += mag;
  }
  if (!drift_zero_)
    for (int l = 0; l < n_; ++l) {
      if (driftc_[l].empty()) continue;
      const double c = driftc_[l].eval(x) * u.d[l];
      v += c;
      s += std::abs(c);
    }
  value = v;
  scale = s;
}

double GaugeGeometry::sublaplacian(const Jet& u, const Vec& x) const {
  double v, s;
  sublaplacian_with_scale(u, x, v, s);
  return v;
}

Polynomial GaugeGeometry::divergence_X(int i) const {
  Polynomial d(n_);
  for (int k = 0; k < n_; ++k) d = d + xpolys_[i][k].derivative(k);
  return d;
}

double GaugeGeometry::commutator_XZ_defect(const Jet& u, const Vec& x,
                                           int i) const {
  u.require_order(2, "commutator check");
  double A[kMaxDim * kMaxDim];
  horizontal_frame(x, A);
  const double* ai = A + i * n_;
  double xi_zu = 0.0, z_xiu = 0.0, xiu = 0.0;
  for (int k = 0; k < n_; ++k) {
    // d_k (Zu) = w_k u_k + sum_l w_l x_l u_kl
    double dkzu = weight(k) * u.d[k];
    for (int l = 0; l < n_; ++l) dkzu += weight(l) * x.a[l] * u.h(k, l);
    xi_zu += ai[k] * dkzu;
    xiu += ai[k] * u.d[k];
  }
  for (int l = 0; l < n_; ++l) {
    // d_l (X_i u) = sum_k (d_l a^i_k) u_k + a^i_k u_lk
    double dlxiu = 0.0;
    for (int k = 0; k < n_; ++k) {
      const Polynomial da = xpolys_[i][k].derivative(l);
      if (!da.is_zero()) dlxiu += da.eval(x) * u.d[k];
      dlxiu += ai[k] * u.h(l, k);
    }
    z_xiu += weight(l) * x.a[l] * dlxiu;
  }
  return xi_zu - z_xiu - xiu;
}

// ---------------------------------------------------------------------------
// psi and Z
// ---------------------------------------------------------------------------

double GaugeGeometry::psi(const Vec& x) const {
  const Jet rho = gauge_jet(x);
  return horizontal_gradient_sq(rho, x);
}

void GaugeGeometry::psi_with_grad(const Vec& x, double& value,
                                  Vec& grad) const {
  const Jet rho = gauge_jet(x);
  double A[kMaxDim * kMaxDim];
  horizontal_frame(x, A);
  double Xrho[kMaxDim];
  for (int i = 0; i < m_; ++i) {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += A[i * n_ + k] * rho.d[k];
    Xrho[i] = s;
  }
  value = 0.0;
  for (int i = 0; i < m_; ++i) value += Xrho[i] * Xrho[i];
  grad = Vec(n_);
  for (int l = 0; l < n_; ++l) {
    double g = 0.0;
    for (int i = 0; i < m_; ++i) {
      double dl_xrho = 0.0;
      for (int k = 0; k < n_; ++k) {
        const Polynomial da = xpolys_[i][k].derivative(l);
        if (!da.is_zero()) dl_xrho += da.eval(x) * rho.d[k];
        if (A[i * n_ + k] != 0.0) dl_xrho += A[i * n_ + k] * rho.h(l, k);
      }
      g += 2.0 * Xrho[i] * dl_xrho;
    }
    grad.a[l] = g;
  }
}

double GaugeGeometry::apply_Z(const Jet& u, const Vec& x) const {
  double s = 0.0;
  for (int k = 0; k < n_; ++k) s += weight(k) * x.a[k] * u.d[k];
  return s;
}

double GaugeGeometry::Z_psi(const Vec& x) const {
  double v;
  Vec g;
  psi_with_grad(x, v, g);
  double s = 0.0;
  for (int k = 0; k < n_; ++k) s += weight(k) * x.a[k] * g.a[k];
  return s;
}

// ---------------------------------------------------------------------------
// Discrepancy
// ---------------------------------------------------------------------------

void GaugeGeometry::discrepancy_with_scale(const Jet& u, const Vec& x,
                                           double& value,
                                           double& scale) const {
  const Jet rho = gauge_jet(x);
  double A[kMaxDim * kMaxDim];
  horizontal_frame(x, A);
  double dot = 0.0, mag = 0.0, psi_v = 0.0;
  for (int i = 0; i < m_; ++i) {
    double xu = 0.0, xr = 0.0;
    for (int k = 0; k < n_; ++k) {
      xu += A[i * n_ + k] * u.d[k];
      xr += A[i * n_ + k] * rho.d[k];
    }
    dot += xu * xr;
    mag += std::abs(xu * xr);
    psi_v += xr * xr;
  }
  const double zu = apply_Z(u, x);
  const double sub = zu / rho.v * psi_v;
  value = dot - sub;
  scale = mag + std::abs(sub);
}

double GaugeGeometry::discrepancy(const Jet& u, const Vec& x) const {
  double v, s;
  discrepancy_with_scale(u, x, v, s);
  return v;
}

double GaugeGeometry::discrepancy(const ScalarField& u, const Vec& x) const {
  return discrepancy(u.jet(x), x);
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

PotentialCheck GaugeGeometry::check_potential(const Potential& V,
                                              const std::vector<Vec>& samples,
                                              double psi_floor) const {
  if (samples.empty())
    fail(ErrorKind::Domain, "check_potential needs a nonempty sample set");
  PotentialCheck out;
  if (V.is_zero()) {
    out.samples_used = static_cast<int>(samples.size());
    return out;
  }
  for (const Vec& x : samples) {
    const double p = psi(x);
    if (p < psi_floor) continue; // ratio degenerate on the center
    const Jet vj = V.field->jet(x);
    out.max_V_ratio = std::max(out.max_V_ratio, std::abs(vj.v) / p);
    out.max_ZV_ratio =
        std::max(out.max_ZV_ratio, std::abs(apply_Z(vj, x)) / p);
    ++out.samples_used;
  }
  return out;
}

double GaugeGeometry::check_discrepancy_bound(const ScalarField& u,
                                              const DiniModulus& f,
                                              const std::vector<Vec>& samples,
                                              double floor) const {
  if (samples.empty())
    fail(ErrorKind::Domain, "check_discrepancy_bound needs samples");
  double worst = 0.0;
  for (const Vec& x : samples) {
    const double rho = gauge(x);
    if (rho <= 0.0) continue;
    const double p = psi(x);
    const double uv = std::abs(u.value(x));
    if (p * uv < floor) continue;
    const double e = std::abs(discrepancy(u, x));
    worst = std::max(worst, e * rho / (f.f(rho) * p * uv));
  }
  return worst;
}

namespace {

/// rho * psi as an order-1 field (enough for ZV bounds on cutoff potentials).
class RhoPsiField final : public ScalarField {
public:
  explicit RhoPsiField(const GaugeGeometry& geom) : geom_(&geom) {}
  int dim() const override { return geom_->dim(); }
  Jet jet(const Vec& x) const override {
    const Jet rho = geom_->gauge_jet(x);
    double p;
    Vec pg;
    geom_->psi_with_grad(x, p, pg);
    Jet r;
    r.n = geom_->dim();
    r.ord = 1;
    r.v = rho.v * p;
    for (int k = 0; k < r.n; ++k) r.d[k] = rho.d[k] * p + rho.v * pg.a[k];
    return r;
  }

private:
  const GaugeGeometry* geom_;
};

class PsiField final : public ScalarField {
public:
  explicit PsiField(const GaugeGeometry& geom) : geom_(&geom) {}
  int dim() const override { return geom_->dim(); }
  Jet jet(const Vec& x) const override {
    double v;
    Vec g;
    geom_->psi_with_grad(x, v, g);
    Jet r;
    r.n = geom_->dim();
    r.ord = 1;
    r.v = v;
    for (int k = 0; k < r.n; ++k) r.d[k] = g.a[k];
    return r;
  }
  double value(const Vec& x) const override { return geom_->psi(x); }

private:
  const GaugeGeometry* geom_;
};

class GaugeField final : public ScalarField {
public:
  explicit GaugeField(const GaugeGeometry& geom) : geom_(&geom) {}
  int dim() const override { return geom_->dim(); }
  Jet jet(const Vec& x) const override { return geom_->gauge_jet(x); }
  double value(const Vec& x) const override { return geom_->gauge(x); }

private:
  const GaugeGeometry* geom_;
};

class RhoPowerField final : public ScalarField {
public:
  RhoPowerField(const GaugeGeometry& geom, double p) : geom_(&geom), p_(p) {}
  int dim() const override { return geom_->dim(); }
  Jet jet(const Vec& x) const override {
    // rho^p = (rho^2)^{p/2}; one pow on the rho^2 jet.
    return jet_pow(geom_->gauge_sq_jet(x), 0.5 * p_);
  }
  double value(const Vec& x) const override {
    return std::pow(geom_->gauge4(x), 0.25 * p_);
  }

private:
  const GaugeGeometry* geom_;
  double p_;
};

} // namespace

Potential GaugeGeometry::make_cutoff_potential(
    FieldPtr vtilde, double support_lo, double support_hi,
    const std::vector<Vec>& samples) const {
  if (!(support_lo > 0.0) || !(support_hi > support_lo))
    fail(ErrorKind::Domain,
         "cutoff must vanish near 0: need 0 < support_lo < support_hi");
  FieldPtr cut = field_compose(bump_curve(support_lo, support_hi),
                               std::make_shared<RhoPsiField>(*this));
  FieldPtr v = vtilde ? field_product(std::move(vtilde), cut) : cut;
  PotentialCheck probe = check_potential(Potential(v, 2.0), samples);
  const double measured =
      std::max(probe.max_V_ratio, probe.max_ZV_ratio) * 1.05;
  Potential out(v, std::max(measured, 1.0 + 1e-6));
  if (!check_potential(out, samples).passes(out.K))
    fail(ErrorKind::Numerical, "cutoff potential failed its own admissibility "
                               "check; enlarge the sample margin");
  return out;
}

FieldPtr GaugeGeometry::psi_field() const {
  return std::make_shared<PsiField>(*this);
}
FieldPtr GaugeGeometry::gauge_field() const {
  return std::make_shared<GaugeField>(*this);
}
FieldPtr GaugeGeometry::rho_power_field(double p) const {
  return std::make_shared<RhoPowerField>(*this, p);
}
FieldPtr GaugeGeometry::gamma_field() const {
  return rho_power_field(2.0 - Q_);
}

Vec GaugeGeometry::ball_box_halfwidths(double r) const {
  Vec w(n_);
  for (int k = 0; k < n_; ++k) {
    if (weight(k) == 1)
      w.a[k] = r;
    else
      w.a[k] = r * r / std::sqrt(c_); // |t| <= rho^2 / sqrt(c)
  }
  return w;
}

Vec random_gauge_point(const GaugeGeometry& geom, std::mt19937_64& rng,
                       double a, double b) {
  const Vec w = geom.ball_box_halfwidths(b);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int tries = 0; tries < 100000; ++tries) {
    Vec x(geom.dim());
    for (int k = 0; k < geom.dim(); ++k) x.a[k] = uni(rng) * w.a[k];
    const double rho = geom.gauge(x);
    if (rho > a && rho < b) return x;
  }
  fail(ErrorKind::Numerical, "rejection sampling failed to hit the annulus");
}

} // namespace freqlab
