#include "freqlab/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "freqlab/errors.hpp"
#include "freqlab/parallel.hpp"

namespace freqlab {

namespace {

void require_h1(const GaugeGeometry& geom) {
  if (geom.kind() != GaugeKind::Heisenberg || geom.dim() != 3)
    fail(ErrorKind::Unsupported, "the grid solver targets H^1 (3 coordinates)");
}

void validate_problem(const GridProblem& p) {
  for (int a = 0; a < 3; ++a) {
    if (p.n[a] < 8)
      fail(ErrorKind::Structural, "solver needs at least 8 nodes per axis");
    if (!(p.hi[a] > p.lo[a]))
      fail(ErrorKind::Structural, "box extents must be increasing");
  }
  if (!p.boundary)
    fail(ErrorKind::Structural, "solver needs Dirichlet boundary data");
}

} // namespace

AssembledSystem assemble(const GaugeGeometry& geom, const GridProblem& prob) {
  require_h1(geom);
  validate_problem(prob);
  const int nx = prob.n[0], ny = prob.n[1], nt = prob.n[2];
  const double hx = prob.h(0), hy = prob.h(1), ht = prob.h(2);

  AssembledSystem sys;
  sys.full.assign(prob.total_nodes(), 0.0);
  std::vector<long> row_of(prob.total_nodes(), -1);

  // Boundary values and interior numbering (t-major).
  for (int k = 0; k < nt; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const long f = prob.flat(i, j, k);
        const bool bdry = i == 0 || i == nx - 1 || j == 0 || j == ny - 1 ||
                          k == 0 || k == nt - 1;
        if (bdry) {
          Vec x{prob.coord(0, i), prob.coord(1, j), prob.coord(2, k)};
          sys.full[f] = prob.boundary->value(x);
        } else {
          row_of[f] = static_cast<long>(sys.interior_flat.size());
          sys.interior_flat.push_back(f);
        }
      }

  const long nrows = static_cast<long>(sys.interior_flat.size());
  sys.A.rows = static_cast<int>(nrows);
  sys.A.rowptr.assign(nrows + 1, 0);
  sys.b.assign(nrows, 0.0);

  struct Entry {
    long flat;
    double coeff;
  };

  auto stencil = [&](int i, int j, int k, std::vector<Entry>& out,
                     double& vcoeff) {
    const double x = prob.coord(0, i), y = prob.coord(1, j);
    Vec g{x, y, prob.coord(2, k)};
    const double axx = 1.0 / (hx * hx), ayy = 1.0 / (hy * hy);
    const double att = 4.0 * (x * x + y * y) / (ht * ht);
    const double axt = 4.0 * y / (4.0 * hx * ht);
    const double ayt = -4.0 * x / (4.0 * hy * ht);
    if (geom.gauge4(g) == 0.0 && !prob.V.is_zero())
      fail(ErrorKind::Structural,
           "grid node at the group identity where V is undefined; use even "
           "node counts");
    vcoeff = prob.V.value(g);
    out.clear();
    out.push_back({prob.flat(i, j, k), -2.0 * axx - 2.0 * ayy - 2.0 * att -
                                           vcoeff});
    out.push_back({prob.flat(i - 1, j, k), axx});
    out.push_back({prob.flat(i + 1, j, k), axx});
    out.push_back({prob.flat(i, j - 1, k), ayy});
    out.push_back({prob.flat(i, j + 1, k), ayy});
    out.push_back({prob.flat(i, j, k - 1), att});
    out.push_back({prob.flat(i, j, k + 1), att});
    // 4y u_xt
    out.push_back({prob.flat(i + 1, j, k + 1), axt});
    out.push_back({prob.flat(i - 1, j, k - 1), axt});
    out.push_back({prob.flat(i + 1, j, k - 1), -axt});
    out.push_back({prob.flat(i - 1, j, k + 1), -axt});
    // -4x u_yt
    out.push_back({prob.flat(i, j + 1, k + 1), ayt});
    out.push_back({prob.flat(i, j - 1, k - 1), ayt});
    out.push_back({prob.flat(i, j + 1, k - 1), -ayt});
    out.push_back({prob.flat(i, j - 1, k + 1), -ayt});
  };

  std::vector<Entry> entries;
  double vcoeff;
  // Two passes: count then fill, so rows go straight into CSR.
  for (long row = 0; row < nrows; ++row) {
    const long f = sys.interior_flat[row];
    const int i = static_cast<int>(f % nx);
    const int j = static_cast<int>((f / nx) % ny);
    const int k = static_cast<int>(f / (static_cast<long>(nx) * ny));
    stencil(i, j, k, entries, vcoeff);
    int cnt = 0;
    for (const Entry& e : entries)
      if (row_of[e.flat] >= 0) ++cnt;
    sys.A.rowptr[row + 1] = sys.A.rowptr[row] + cnt;
  }
  sys.A.col.assign(sys.A.rowptr[nrows], 0);
  sys.A.val.assign(sys.A.rowptr[nrows], 0.0);
  for (long row = 0; row < nrows; ++row) {
    const long f = sys.interior_flat[row];
    const int i = static_cast<int>(f % nx);
    const int j = static_cast<int>((f / nx) % ny);
    const int k = static_cast<int>(f / (static_cast<long>(nx) * ny));
    stencil(i, j, k, entries, vcoeff);
    long at = sys.A.rowptr[row];
    double rhs = 0.0;
    for (const Entry& e : entries) {
      const long r2 = row_of[e.flat];
      if (r2 >= 0) {
        sys.A.col[at] = static_cast<int>(r2);
        sys.A.val[at] = e.coeff;
        ++at;
      } else {
        rhs -= e.coeff * sys.full[e.flat];
      }
    }
    sys.b[row] = rhs;
  }
  return sys;
}

namespace {

void spmv(const CsrMatrix& A, const std::vector<double>& x,
          std::vector<double>& y) {
  const int blocks = 64;
  const long rows = A.rows;
  parallel_chunks(blocks, [&](int blk) {
    const long lo = rows * blk / blocks;
    const long hi = rows * (blk + 1) / blocks;
    for (long r = lo; r < hi; ++r) {
      double s = 0.0;
      for (long p = A.rowptr[r]; p < A.rowptr[r + 1]; ++p)
        s += A.val[p] * x[A.col[p]];
      y[r] = s;
    }
  });
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2v(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace

DiscreteSolution solve(const GaugeGeometry& geom, const GridProblem& prob,
                       double tol, int max_iter) {
  AssembledSystem sys = assemble(geom, prob);
  const long n = sys.A.rows;

  std::vector<double> diag(n);
  for (long r = 0; r < n; ++r) {
    double d = 0.0;
    for (long p = sys.A.rowptr[r]; p < sys.A.rowptr[r + 1]; ++p)
      if (sys.A.col[p] == r) d = sys.A.val[p];
    diag[r] = d != 0.0 ? 1.0 / d : 1.0;
  }

  const double bnorm = norm2v(sys.b);
  DiscreteSolution out;
  out.problem = prob;
  out.values = sys.full;
  if (bnorm == 0.0) {
    // Zero data: the unique discrete solution is zero.
    out.residual_norm = 0.0;
    return out;
  }

  std::vector<double> x(n, 0.0), r(sys.b), rhat(sys.b), p(n, 0.0), v(n, 0.0);
  std::vector<double> phat(n), s(n), shat(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double resid = norm2v(r) / bnorm;
  out.residual_history.push_back(resid);

  int it = 0;
  for (; it < max_iter && resid > tol; ++it) {
    const double rho1 = dot(rhat, r);
    if (std::abs(rho1) < 1e-290) break; // breakdown
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho1 / rho) * (alpha / omega);
      for (long i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho1;
    for (long i = 0; i < n; ++i) phat[i] = diag[i] * p[i];
    spmv(sys.A, phat, v);
    alpha = rho1 / dot(rhat, v);
    for (long i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2v(s) / bnorm <= tol) {
      for (long i = 0; i < n; ++i) x[i] += alpha * phat[i];
      resid = norm2v(s) / bnorm;
      out.residual_history.push_back(resid);
      break;
    }
    for (long i = 0; i < n; ++i) shat[i] = diag[i] * s[i];
    spmv(sys.A, shat, t);
    const double tt = dot(t, t);
    if (tt == 0.0) break;
    omega = dot(t, s) / tt;
    for (long i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
    for (long i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    resid = norm2v(r) / bnorm;
    out.residual_history.push_back(resid);
    if (omega == 0.0) break;
  }

  if (resid > tol)
    fail(ErrorKind::Numerical,
         "BiCGStab stagnated at relative residual " + std::to_string(resid) +
             " after " + std::to_string(it) + " iterations");

  out.iterations = it;
  out.residual_norm = resid;
  for (long row = 0; row < n; ++row) out.values[sys.interior_flat[row]] = x[row];
  return out;
}

double max_interior_error(const DiscreteSolution& sol,
                          const ScalarField& reference) {
  const GridProblem& p = sol.problem;
  double worst = 0.0;
  for (int k = 1; k < p.n[2] - 1; ++k)
    for (int j = 1; j < p.n[1] - 1; ++j)
      for (int i = 1; i < p.n[0] - 1; ++i) {
        Vec x{p.coord(0, i), p.coord(1, j), p.coord(2, k)};
        worst = std::max(worst, std::abs(sol.values[p.flat(i, j, k)] -
                                         reference.value(x)));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Interpolated field
// ---------------------------------------------------------------------------

namespace {

class GridFieldImpl final : public ScalarField {
public:
  explicit GridFieldImpl(const DiscreteSolution& sol) : p_(sol.problem) {
    const long total = p_.total_nodes();
    grids_.resize(10);
    grids_[0] = sol.values;
    for (int g = 1; g < 10; ++g) grids_[g].assign(total, 0.0);
    // 1..3: gradient, 4..9: hessian xx, yy, tt, xy, xt, yt.
    derive(0, 0, 1);
    derive(0, 1, 2);
    derive(0, 2, 3);
    derive(1, 0, 4);
    derive(2, 1, 5);
    derive(3, 2, 6);
    derive(1, 1, 7);
    derive(1, 2, 8);
    derive(2, 2, 9);
  }

  int dim() const override { return 3; }

  double value(const Vec& x) const override { return interp(0, x); }

  Jet jet(const Vec& x) const override {
    Jet j;
    j.n = 3;
    j.v = interp(0, x);
    j.d[0] = interp(1, x);
    j.d[1] = interp(2, x);
    j.d[2] = interp(3, x);
    j.h(0, 0) = interp(4, x);
    j.h(1, 1) = interp(5, x);
    j.h(2, 2) = interp(6, x);
    j.h(0, 1) = j.h(1, 0) = interp(7, x);
    j.h(0, 2) = j.h(2, 0) = interp(8, x);
    j.h(1, 2) = j.h(2, 1) = interp(9, x);
    return j;
  }

private:
  // Second-order first derivative of grid src along axis into dst.
  void derive(int src, int axis, int dst) {
    const int nx = p_.n[0], ny = p_.n[1], nt = p_.n[2];
    const double h = p_.h(axis);
    const std::vector<double>& u = grids_[src];
    std::vector<double>& d = grids_[dst];
    const int stride[3] = {1, nx, nx * ny};
    const int count[3] = {nx, ny, nt};
    const long st = stride[axis];
    const int na = count[axis];
    for (int k = 0; k < nt; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          const long f = p_.flat(i, j, k);
          const int a = axis == 0 ? i : axis == 1 ? j : k;
          if (a == 0)
            d[f] = (-3.0 * u[f] + 4.0 * u[f + st] - u[f + 2 * st]) / (2.0 * h);
          else if (a == na - 1)
            d[f] = (3.0 * u[f] - 4.0 * u[f - st] + u[f - 2 * st]) / (2.0 * h);
          else
            d[f] = (u[f + st] - u[f - st]) / (2.0 * h);
        }
  }

  double interp(int g, const Vec& x) const {
    double w[3][2];
    int base[3];
    for (int a = 0; a < 3; ++a) {
      const double s = (x.a[a] - p_.lo[a]) / p_.h(a);
      int i = static_cast<int>(std::floor(s));
      i = std::max(0, std::min(i, p_.n[a] - 2));
      const double f = s - i;
      base[a] = i;
      w[a][0] = 1.0 - f;
      w[a][1] = f;
    }
    const std::vector<double>& u = grids_[g];
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
      for (int dj = 0; dj < 2; ++dj)
        for (int di = 0; di < 2; ++di)
          acc += w[0][di] * w[1][dj] * w[2][dk] *
                 u[p_.flat(base[0] + di, base[1] + dj, base[2] + dk)];
    return acc;
  }

  GridProblem p_;
  std::vector<std::vector<double>> grids_;
};

} // namespace

FieldPtr grid_field(const DiscreteSolution& sol) {
  return std::make_shared<GridFieldImpl>(sol);
}

FrequencyProfile discrete_frequency_pipeline(const GaugeGeometry& geom,
                                             const DiscreteSolution& sol,
                                             const std::vector<double>& r_grid,
                                             double alpha,
                                             const QuadratureSpec& spec) {
  require_h1(geom);
  if (r_grid.empty()) fail(ErrorKind::Domain, "pipeline needs radii");
  const Vec w = geom.ball_box_halfwidths(r_grid.back());
  for (int a = 0; a < 3; ++a) {
    const double margin = 2.0 * sol.problem.h(a);
    if (sol.problem.lo[a] > -w.a[a] - margin + 1e-15 ||
        sol.problem.hi[a] < w.a[a] + margin - 1e-15)
      fail(ErrorKind::Domain,
           "gauge ball exceeds the solved box (need a 2-cell margin)");
  }
  CatalogEntry entry;
  entry.id = "grid-solution";
  entry.u = grid_field(sol);
  entry.V = sol.problem.V;
  entry.K = entry.V.K;
  entry.V_is_lambda_psi = false;
  return frequency_profile(geom, entry, r_grid, alpha, spec);
}

// ---------------------------------------------------------------------------
// Dump / load
// ---------------------------------------------------------------------------

void save_solution(const DiscreteSolution& sol, const std::string& base) {
  nlohmann::ordered_json hdr;
  hdr["dims"] = {sol.problem.n[0], sol.problem.n[1], sol.problem.n[2]};
  hdr["lo"] = {sol.problem.lo[0], sol.problem.lo[1], sol.problem.lo[2]};
  hdr["hi"] = {sol.problem.hi[0], sol.problem.hi[1], sol.problem.hi[2]};
  hdr["ordering"] = "t-major";
  hdr["count"] = sol.values.size();
  hdr["residual_norm"] = sol.residual_norm;
  hdr["iterations"] = sol.iterations;
  std::ofstream jh(base + ".json");
  jh << hdr.dump(2) << "\n";
  std::ofstream bin(base + ".bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(sol.values.data()),
            static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
}

DiscreteSolution load_solution(const std::string& base) {
  std::ifstream jh(base + ".json");
  if (!jh) fail(ErrorKind::Structural, "missing header " + base + ".json");
  nlohmann::json hdr = nlohmann::json::parse(jh);
  DiscreteSolution sol;
  for (int a = 0; a < 3; ++a) {
    sol.problem.n[a] = hdr["dims"][a].get<int>();
    sol.problem.lo[a] = hdr["lo"][a].get<double>();
    sol.problem.hi[a] = hdr["hi"][a].get<double>();
  }
  sol.residual_norm = hdr.value("residual_norm", 0.0);
  sol.iterations = hdr.value("iterations", 0);
  sol.values.assign(hdr["count"].get<std::size_t>(), 0.0);
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) fail(ErrorKind::Structural, "missing data " + base + ".bin");
  bin.read(reinterpret_cast<char*>(sol.values.data()),
           static_cast<std::streamsize>(sol.values.size() * sizeof(double)));
  return sol;
}

} // namespace freqlab
