#include "freqlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "freqlab/errors.hpp"

namespace freqlab {

// ---------------------------------------------------------------------------
// Radial series
// ---------------------------------------------------------------------------

RadialSeries RadialSeries::build(double lambda, int k, int Q, double rho_max,
                                 double tol, int max_order) {
  if (lambda < 0.0)
    fail(ErrorKind::Domain, "radial eigensolution needs lambda >= 0");
  RadialSeries s;
  s.lambda_ = lambda;
  s.k_ = k;
  s.Q_ = Q;
  s.a_ = {1.0};
  if (lambda == 0.0) {
    s.remainder_ = 0.0;
    return s;
  }
  const double smax = rho_max * rho_max;
  double a = 1.0;
  for (int j = 0;; ++j) {
    const double next = -lambda * a / ((2.0 * j + 2.0) * (2.0 * j + 2 * k + Q));
    // Tail bound: once the term ratio drops below 1 the series alternates
    // with decreasing magnitude, so the dropped tail is at most the first
    // omitted term divided by (1 - ratio).
    const double t_next = std::abs(next) * std::pow(smax, j + 1);
    const double ratio =
        lambda * smax / ((2.0 * j + 4.0) * (2.0 * j + 2 * k + Q + 2.0));
    if (ratio < 1.0 && t_next / (1.0 - ratio) < tol) {
      s.remainder_ = t_next / (1.0 - ratio);
      break;
    }
    if (j + 1 > max_order) {
      // Estimate the order actually needed for the error message.
      int need = j + 1;
      double aa = next, tt = t_next;
      while (need < 4 * max_order + 64 && tt > tol) {
        aa = -lambda * aa /
             ((2.0 * need + 2.0) * (2.0 * need + 2 * k + Q));
        tt = std::abs(aa) * std::pow(smax, need + 1);
        ++need;
      }
      fail(ErrorKind::Numerical,
           "radial series remainder above tolerance at order " +
               std::to_string(max_order) + "; about order " +
               std::to_string(need) + " would be required");
    }
    s.a_.push_back(next);
    a = next;
  }
  return s;
}

void RadialSeries::eval_s(double s, double& f, double& dfds,
                          double& ddfds2) const {
  const int J = static_cast<int>(a_.size()) - 1;
  double v = a_[J], d = 0.0, dd = 0.0;
  for (int j = J - 1; j >= 0; --j) {
    dd = dd * s + 2.0 * d;
    d = d * s + v;
    v = v * s + a_[j];
  }
  f = v;
  dfds = d;
  ddfds2 = dd;
}

double RadialSeries::value_at_rho(double rho) const {
  const double s = rho * rho;
  double v = a_.back();
  for (int j = static_cast<int>(a_.size()) - 2; j >= 0; --j) v = v * s + a_[j];
  return v;
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

namespace {

/// u = P(x) * f(rho) evaluated with one fused chain rule per point.
class EigenmodeField final : public ScalarField {
public:
  EigenmodeField(const GaugeGeometry& geom, std::optional<Polynomial> P,
                 RadialSeries F)
      : geom_(&geom), F_(std::move(F)) {
    if (P) Pf_ = std::make_shared<PolynomialField>(*P);
  }
  int dim() const override { return geom_->dim(); }
  Jet jet(const Vec& x) const override {
    const Jet s = geom_->gauge_sq_jet(x);
    double f, df, ddf;
    F_.eval_s(s.v, f, df, ddf);
    const Jet radial = chain(s, f, df, ddf);
    return Pf_ ? Pf_->jet(x) * radial : radial;
  }
  double value(const Vec& x) const override {
    const double rho2 = std::sqrt(geom_->gauge4(x));
    double f, df, ddf;
    F_.eval_s(rho2, f, df, ddf);
    return Pf_ ? Pf_->value(x) * f : f;
  }

private:
  const GaugeGeometry* geom_;
  std::shared_ptr<PolynomialField> Pf_;
  RadialSeries F_;
};

Polynomial horizontal_square_poly(const GaugeGeometry& geom) {
  const int n = geom.dim();
  Polynomial z2(n);
  for (int i = 0; i < geom.hdim(); ++i) {
    Exponents e{};
    e[i] = 2;
    z2.add_term(e, 1.0);
  }
  return z2;
}

/// Delta_H applied symbolically to a polynomial.
Polynomial symbolic_sublaplacian(const GaugeGeometry& geom,
                                 const Polynomial& p) {
  const int n = geom.dim();
  Polynomial out(n);
  for (int i = 0; i < geom.hdim(); ++i) {
    const auto& a = geom.field_polys(i);
    Polynomial xp(n);
    for (int k = 0; k < n; ++k)
      if (!a[k].is_zero()) xp = xp + a[k] * p.derivative(k);
    for (int k = 0; k < n; ++k)
      if (!a[k].is_zero()) out = out + a[k] * xp.derivative(k);
  }
  return out;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

} // namespace

Polynomial heisenberg_solid_harmonic(const GaugeGeometry& geom, int k) {
  if (geom.kind() != GaugeKind::Heisenberg)
    fail(ErrorKind::Domain, "solid harmonics are a Heisenberg construction");
  if (k < 0 || k % 2 != 0)
    fail(ErrorKind::Domain,
         "polyradial solid harmonics exist for even degrees only");
  const int n = geom.dim();
  if (k == 0) return Polynomial::constant(n, 1.0);

  const int half = k / 2;
  const Polynomial z2 = horizontal_square_poly(geom);
  const int taxis = geom.hdim();

  // Basis m_a = |z|^{2a} t^{half-a}, a = 0..half.
  std::vector<Polynomial> basis;
  for (int a = 0; a <= half; ++a) {
    Polynomial p = Polynomial::constant(n, 1.0);
    for (int i = 0; i < a; ++i) p = p * z2;
    Exponents e{};
    e[taxis] = static_cast<std::uint8_t>(half - a);
    p = p * Polynomial::monomial(n, e, 1.0);
    basis.push_back(p);
  }

  // Nullspace of the sub-Laplacian on that basis.
  std::vector<Polynomial> images;
  std::map<Exponents, int> rows;
  for (const Polynomial& b : basis) {
    images.push_back(symbolic_sublaplacian(geom, b));
    for (const auto& [e, c] : images.back().terms())
      rows.emplace(e, static_cast<int>(rows.size()));
  }
  const int nrows = static_cast<int>(rows.size());
  const int ncols = half + 1;
  std::vector<std::vector<double>> M(nrows, std::vector<double>(ncols, 0.0));
  for (int a = 0; a < ncols; ++a)
    for (const auto& [e, c] : images[a].terms()) M[rows[e]][a] = c;

  // Gauss-Jordan elimination; the single free column parameterizes the
  // nullspace, which is then rescaled to t^{half} coefficient 1.
  std::vector<double> coeff(ncols, 0.0);
  {
    std::vector<int> pivot_col;
    std::vector<bool> is_pivot(ncols, false);
    int rank = 0;
    for (int col = 0; col < ncols && rank < nrows; ++col) {
      int piv = -1;
      double best = 1e-10;
      for (int r = rank; r < nrows; ++r)
        if (std::abs(M[r][col]) > best) {
          best = std::abs(M[r][col]);
          piv = r;
        }
      if (piv < 0) continue;
      std::swap(M[rank], M[piv]);
      for (int r = 0; r < nrows; ++r) {
        if (r == rank || M[r][col] == 0.0) continue;
        const double f = M[r][col] / M[rank][col];
        for (int cc = 0; cc < ncols; ++cc) M[r][cc] -= f * M[rank][cc];
      }
      pivot_col.push_back(col);
      is_pivot[col] = true;
      ++rank;
    }
    if (rank != ncols - 1)
      fail(ErrorKind::Numerical,
           "solid harmonic nullspace is not one-dimensional at degree " +
               std::to_string(k));
    int free_col = -1;
    for (int c = 0; c < ncols; ++c)
      if (!is_pivot[c]) free_col = c;
    coeff[free_col] = 1.0;
    for (int r = 0; r < rank; ++r)
      coeff[pivot_col[r]] = -M[r][free_col] / M[r][pivot_col[r]];
    if (std::abs(coeff[0]) < 1e-12)
      fail(ErrorKind::Numerical,
           "solid harmonic normalization failed: no t^{k/2} component");
    const double inv = 1.0 / coeff[0];
    for (double& c : coeff) c *= inv;
  }

  Polynomial P(n);
  for (int a = 0; a < ncols; ++a) P = P + basis[a] * coeff[a];

  const Polynomial residual = symbolic_sublaplacian(geom, P);
  if (residual.max_coeff_delta(Polynomial(n)) > 1e-9)
    fail(ErrorKind::Numerical, "solid harmonic residual is nonzero");
  return P;
}

// ---------------------------------------------------------------------------
// Entry verification
// ---------------------------------------------------------------------------

EntryVerification verify_entry(const GaugeGeometry& geom,
                               const CatalogEntry& entry, int nsamples,
                               std::uint64_t seed, double eq_tol,
                               double disc_tol) {
  std::mt19937_64 rng(seed);
  const double lo =
      entry.valid_region.kind == Region::Annulus ? entry.valid_region.a
                                                 : 1e-3 * entry.valid_region.b;
  const double hi = entry.valid_region.b;
  std::vector<Vec> samples;
  samples.reserve(nsamples);
  for (int i = 0; i < nsamples; ++i)
    samples.push_back(random_gauge_point(geom, rng, lo, hi));

  EntryVerification out;
  out.samples = nsamples;
  for (const Vec& x : samples) {
    const Jet uj = entry.u->jet(x);
    double lap, scale;
    geom.sublaplacian_with_scale(uj, x, lap, scale);
    const double vu = entry.V.value(x) * uj.v;
    const double rel =
        std::abs(lap - vu) / (scale + std::abs(vu) + 1e-300);
    out.max_equation_residual = std::max(out.max_equation_residual, rel);

    if (entry.discrepancy_class == DiscrepancyClass::Zero) {
      double e, escale;
      geom.discrepancy_with_scale(uj, x, e, escale);
      const double drel = escale > 0.0 ? std::abs(e) / escale : 0.0;
      out.max_discrepancy_residual =
          std::max(out.max_discrepancy_residual, drel);
    }
  }
  out.potential = geom.check_potential(entry.V, samples);
  out.pass = out.max_equation_residual <= eq_tol &&
             out.max_discrepancy_residual <= disc_tol &&
             out.potential.passes(entry.K);
  if (!out.pass) {
    std::ostringstream os;
    os << "entry " << entry.id << ": eq=" << out.max_equation_residual
       << " disc=" << out.max_discrepancy_residual
       << " |V|/psi=" << out.potential.max_V_ratio
       << " |ZV|/psi=" << out.potential.max_ZV_ratio << " K=" << entry.K;
    out.detail = os.str();
  }
  return out;
}

namespace {

void verify_or_throw(const GaugeGeometry& geom, const CatalogEntry& e) {
  const EntryVerification v = verify_entry(geom, e);
  if (!v.pass)
    fail(ErrorKind::Numerical, "catalog entry failed construction-time "
                               "verification: " + v.detail);
}

std::string geom_tag(const GaugeGeometry& geom) {
  std::string t = geom.id();
  t.erase(std::remove(t.begin(), t.end(), ':'), t.end());
  return t;
}

constexpr double kEps = 1e-6; // K = max(lambda, 1 + eps)

} // namespace

std::vector<CatalogEntry> harmonic_coordinates(const GaugeGeometry& geom) {
  if (geom.kind() != GaugeKind::Heisenberg)
    fail(ErrorKind::Domain, "harmonic coordinates are a Heisenberg catalog");
  const int n = geom.hdim() / 2;
  const std::string tag = geom_tag(geom);
  std::vector<CatalogEntry> out;
  auto push = [&](const std::string& axis, int index, double order,
                  DiscrepancyClass cls) {
    CatalogEntry e;
    e.id = tag + "/coord?axis=" + axis;
    e.u = make_coordinate(geom.dim(), index);
    e.V = Potential();
    e.K = e.V.K;
    e.known_order = order;
    e.discrepancy_class = cls;
    verify_or_throw(geom, e);
    out.push_back(std::move(e));
  };
  for (int i = 0; i < n; ++i)
    push("x" + std::to_string(i + 1), i, 1.0, DiscrepancyClass::Unknown);
  for (int i = 0; i < n; ++i)
    push("y" + std::to_string(i + 1), n + i, 1.0, DiscrepancyClass::Unknown);
  push("t", 2 * n, 2.0, DiscrepancyClass::Zero);
  return out;
}

CatalogEntry heisenberg_eigenmode(const GaugeGeometry& geom, int k,
                                  double lambda) {
  if (geom.kind() != GaugeKind::Heisenberg)
    fail(ErrorKind::Domain, "eigenmodes are a Heisenberg catalog");
  const RadialSeries F = RadialSeries::build(lambda, k, geom.Q(), 1.0);
  std::optional<Polynomial> P;
  if (k > 0) P = heisenberg_solid_harmonic(geom, k);

  CatalogEntry e;
  std::ostringstream id;
  id << geom_tag(geom) << (k == 0 ? "/radial-eig?lambda=" : "/eigenmode?")
     << (k == 0 ? "" : "k=" + std::to_string(k) + "&lambda=") << lambda;
  e.id = id.str();
  e.u = std::make_shared<EigenmodeField>(geom, P, F);
  e.lambda = lambda;
  if (lambda > 0.0) {
    e.V = Potential(field_scale(-lambda, geom.psi_field()),
                    std::max(lambda, 1.0 + kEps));
    e.V_is_lambda_psi = true;
  }
  e.K = e.V.K;
  e.known_order = static_cast<double>(k);
  e.discrepancy_class = DiscrepancyClass::Zero;
  verify_or_throw(geom, e);
  return e;
}

CatalogEntry radial_eigensolution(const GaugeGeometry& geom, double lambda) {
  if (geom.kind() == GaugeKind::Heisenberg)
    return heisenberg_eigenmode(geom, 0, lambda);
  // Euclidean radial case, mainly used against the sin(rho)/rho oracle.
  const RadialSeries F = RadialSeries::build(lambda, 0, geom.Q(), 1.0);
  CatalogEntry e;
  std::ostringstream id;
  id << geom_tag(geom) << "/radial-eig?lambda=" << lambda;
  e.id = id.str();
  e.u = std::make_shared<EigenmodeField>(geom, std::nullopt, F);
  e.lambda = lambda;
  if (lambda > 0.0) {
    e.V = Potential(field_scale(-lambda, geom.psi_field()),
                    std::max(lambda, 1.0 + kEps));
    e.V_is_lambda_psi = true;
  }
  e.K = e.V.K;
  e.known_order = 0.0;
  e.discrepancy_class = DiscrepancyClass::Zero;
  verify_or_throw(geom, e);
  return e;
}

CatalogEntry fundamental_solution_entry(const GaugeGeometry& geom, double a,
                                        double b) {
  if (geom.Q() <= 2)
    fail(ErrorKind::Domain,
         "fundamental solution entry needs homogeneous dimension > 2");
  if (!(a > 0.0) || !(b > a)) fail(ErrorKind::Domain, "need 0 < a < b");
  CatalogEntry e;
  std::ostringstream id;
  id << geom_tag(geom) << "/fundsol?a=" << a << "&b=" << b;
  e.id = id.str();
  e.u = geom.gamma_field();
  e.V = Potential();
  e.K = e.V.K;
  e.discrepancy_class = DiscrepancyClass::Zero; // radial
  e.valid_region = {Region::Annulus, a, b};
  verify_or_throw(geom, e);
  return e;
}

CatalogEntry euclidean_spherical_harmonic(const GaugeGeometry& geom,
                                          int kappa) {
  if (geom.kind() != GaugeKind::Euclidean || geom.dim() < 2)
    fail(ErrorKind::Domain,
         "spherical harmonics need Euclidean geometry of dimension >= 2");
  if (kappa < 0) fail(ErrorKind::Domain, "kappa must be a nonnegative integer");
  const int n = geom.dim();
  // Re(x_1 + i x_2)^kappa.
  Polynomial p(n);
  for (int j = 0; j <= kappa; j += 2) {
    Exponents e{};
    e[0] = static_cast<std::uint8_t>(kappa - j);
    e[1] = static_cast<std::uint8_t>(j);
    p.add_term(e, binom(kappa, j) * ((j / 2) % 2 == 0 ? 1.0 : -1.0));
  }
  if (kappa == 0) p = Polynomial::constant(n, 1.0);

  CatalogEntry e;
  std::ostringstream id;
  id << geom_tag(geom) << "/sph-harm?kappa=" << kappa;
  e.id = id.str();
  e.u = make_polynomial(p);
  e.V = Potential();
  e.lambda = static_cast<double>(kappa) * (kappa + n - 2); // pairing value
  e.K = std::max(e.lambda, 1.0 + kEps);
  e.known_order = static_cast<double>(kappa);
  e.discrepancy_class = DiscrepancyClass::Zero;
  verify_or_throw(geom, e);
  return e;
}

// ---------------------------------------------------------------------------
// Id parsing
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::string> parse_query(const std::string& q) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos < q.size()) {
    const std::size_t amp = q.find('&', pos);
    const std::string kv = q.substr(pos, amp == std::string::npos ? q.size() - pos
                                                                  : amp - pos);
    const std::size_t eq = kv.find('=');
    if (eq != std::string::npos) out[kv.substr(0, eq)] = kv.substr(eq + 1);
    if (amp == std::string::npos) break;
    pos = amp + 1;
  }
  return out;
}

} // namespace

CatalogEntry catalog_entry_from_id(const GaugeGeometry& geom,
                                   const std::string& id) {
  const std::size_t slash = id.find('/');
  if (slash == std::string::npos)
    fail(ErrorKind::Structural, "catalog id must look like geom/kind?params: " + id);
  const std::string tag = id.substr(0, slash);
  if (tag != geom_tag(geom))
    fail(ErrorKind::Structural, "catalog id " + id + " does not match geometry " +
                                  geom.id());
  std::string kind = id.substr(slash + 1);
  std::map<std::string, std::string> params;
  const std::size_t qm = kind.find('?');
  if (qm != std::string::npos) {
    params = parse_query(kind.substr(qm + 1));
    kind = kind.substr(0, qm);
  }
  auto get_d = [&](const std::string& key, double dflt,
                   bool required = false) {
    auto it = params.find(key);
    if (it == params.end()) {
      if (required)
        fail(ErrorKind::Structural, "catalog id " + id + " needs " + key);
      return dflt;
    }
    return std::atof(it->second.c_str());
  };

  if (kind == "radial-eig")
    return radial_eigensolution(geom, get_d("lambda", 0.0, true));
  if (kind == "eigenmode")
    return heisenberg_eigenmode(geom, static_cast<int>(get_d("k", 0.0, true)),
                                get_d("lambda", 0.0, true));
  if (kind == "fundsol")
    return fundamental_solution_entry(geom, get_d("a", 0.2), get_d("b", 1.0));
  if (kind == "sph-harm")
    return euclidean_spherical_harmonic(
        geom, static_cast<int>(get_d("kappa", 0.0, true)));
  if (kind == "coord") {
    auto it = params.find("axis");
    if (it == params.end())
      fail(ErrorKind::Structural, "coord entry needs axis=");
    for (CatalogEntry& e : harmonic_coordinates(geom))
      if (e.id == id) return e;
    fail(ErrorKind::Structural, "unknown coordinate axis in " + id);
  }
  fail(ErrorKind::Structural, "unknown catalog entry kind: " + kind);
}

} // namespace freqlab
