#include "freqlab/algebra.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "freqlab/errors.hpp"

namespace freqlab {

StratifiedAlgebra::StratifiedAlgebra(int step, std::vector<int> strata_dims)
    : step_(step), strata_(std::move(strata_dims)) {
  if (step_ < 1 || static_cast<int>(strata_.size()) != step_)
    fail(ErrorKind::Structural, "step must match the number of strata");
  for (int m : strata_)
    if (m < 1) fail(ErrorKind::Structural, "strata dimensions must be positive");
  dim_ = std::accumulate(strata_.begin(), strata_.end(), 0);
  if (dim_ > kMaxDim)
    fail(ErrorKind::Unsupported,
         "algebra dimension exceeds compiled limit " + std::to_string(kMaxDim));
  stratum_.resize(dim_);
  int idx = 0;
  for (int s = 0; s < step_; ++s)
    for (int r = 0; r < strata_[s]; ++r) stratum_[idx++] = s + 1;
  c_.assign(static_cast<std::size_t>(dim_) * dim_ * dim_, 0.0);
}

StratifiedAlgebra StratifiedAlgebra::euclidean(int n) {
  StratifiedAlgebra alg(1, {n});
  alg.set_id("euclidean:" + std::to_string(n));
  return alg;
}

StratifiedAlgebra StratifiedAlgebra::heisenberg(int n) {
  StratifiedAlgebra alg(2, {2 * n, 1});
  const int t = 2 * n;
  for (int i = 0; i < n; ++i) {
    alg.set_bracket(i, n + i, t, -4.0);
    alg.set_bracket(n + i, i, t, 4.0);
  }
  alg.set_id("heisenberg:" + std::to_string(n));
  return alg;
}

void StratifiedAlgebra::set_bracket(int i, int j, int k, double value) {
  if (i < 0 || j < 0 || k < 0 || i >= dim_ || j >= dim_ || k >= dim_)
    fail(ErrorKind::Structural, "bracket index out of range");
  c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k] = value;
}

Vec StratifiedAlgebra::bracket(const Vec& a, const Vec& b) const {
  Vec r(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (a.a[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (b.a[j] == 0.0) continue;
      const double w = a.a[i] * b.a[j];
      for (int k = 0; k < dim_; ++k) r.a[k] += w * c(i, j, k);
    }
  }
  return r;
}

StratifiedAlgebra StratifiedAlgebra::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Structural, std::string("algebra JSON parse error: ") + e.what());
  }
  if (!doc.contains("step") || !doc.contains("strata"))
    fail(ErrorKind::Structural, "algebra JSON needs \"step\" and \"strata\"");
  StratifiedAlgebra alg(doc["step"].get<int>(),
                        doc["strata"].get<std::vector<int>>());
  if (doc.contains("brackets"))
    for (const auto& b : doc["brackets"])
      alg.set_bracket(b.at("i").get<int>(), b.at("j").get<int>(),
                      b.at("k").get<int>(), b.at("c").get<double>());
  alg.set_id("custom");
  return alg;
}

StratifiedAlgebra StratifiedAlgebra::from_id(const std::string& id) {
  auto colon = id.find(':');
  if (colon != std::string::npos) {
    const std::string kind = id.substr(0, colon);
    const int n = std::atoi(id.c_str() + colon + 1);
    if (n >= 1 && kind == "euclidean") return euclidean(n);
    if (n >= 1 && kind == "heisenberg") return heisenberg(n);
  }
  std::ifstream in(id);
  if (!in) fail(ErrorKind::Structural, "unknown algebra id: " + id);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ValidationReport::summary() const {
  if (ok()) return "valid";
  std::ostringstream os;
  for (const auto& v : issues)
    os << v.invariant << "(" << v.i << "," << v.j << "," << v.k << ") "
       << v.detail << "; ";
  return os.str();
}

namespace {

// Rank of an r x c matrix by Gaussian elimination with partial pivoting.
int matrix_rank(std::vector<std::vector<double>> m, double tol = 1e-10) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    double best = tol;
    for (int r = rank; r < rows; ++r)
      if (std::abs(m[r][col]) > best) {
        best = std::abs(m[r][col]);
        piv = r;
      }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    for (int r = rank + 1; r < rows; ++r) {
      const double f = m[r][col] / m[rank][col];
      for (int cc = col; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
    }
    ++rank;
  }
  return rank;
}

} // namespace

ValidationReport validate_algebra(const StratifiedAlgebra& alg) {
  ValidationReport rep;
  const int n = alg.dim();
  const double tol = 1e-12;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double s = alg.c(i, j, k) + alg.c(j, i, k);
        if (std::abs(s) > tol)
          rep.issues.push_back({"antisymmetry", i, j, k, std::abs(s),
                                "c^k_ij + c^k_ji = " + std::to_string(s)});
      }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec jac = alg.bracket(alg.bracket(Vec::unit(n, i), Vec::unit(n, j)),
                              Vec::unit(n, k));
        jac += alg.bracket(alg.bracket(Vec::unit(n, j), Vec::unit(n, k)),
                           Vec::unit(n, i));
        jac += alg.bracket(alg.bracket(Vec::unit(n, k), Vec::unit(n, i)),
                           Vec::unit(n, j));
        if (max_abs(jac) > tol)
          rep.issues.push_back(
              {"jacobi", i, j, k, max_abs(jac), "Jacobi identity violated"});
      }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int target = alg.stratum(i) + alg.stratum(j);
      for (int k = 0; k < n; ++k) {
        if (std::abs(alg.c(i, j, k)) <= tol) continue;
        if (target > alg.step() || alg.stratum(k) != target)
          rep.issues.push_back({"grading", i, j, k, std::abs(alg.c(i, j, k)),
                                "bracket lands outside stratum " +
                                    std::to_string(target)});
      }
    }

  // [V_1, V_j] must span V_{j+1}.
  for (int s = 1; s < alg.step(); ++s) {
    std::vector<std::vector<double>> rows;
    std::vector<int> targets;
    for (int k = 0; k < n; ++k)
      if (alg.stratum(k) == s + 1) targets.push_back(k);
    for (int i = 0; i < n; ++i) {
      if (alg.stratum(i) != 1) continue;
      for (int j = 0; j < n; ++j) {
        if (alg.stratum(j) != s) continue;
        Vec br = alg.bracket(Vec::unit(n, i), Vec::unit(n, j));
        std::vector<double> row;
        for (int k : targets) row.push_back(br.a[k]);
        rows.push_back(std::move(row));
      }
    }
    const int rank = rows.empty() ? 0 : matrix_rank(std::move(rows));
    if (rank != static_cast<int>(targets.size()))
      rep.issues.push_back({"generation", s, -1, -1,
                            double(static_cast<int>(targets.size()) - rank),
                            "[V_1,V_" + std::to_string(s) + "] has rank " +
                                std::to_string(rank) + " < " +
                                std::to_string(targets.size())});
  }
  return rep;
}

int homogeneous_dimension(const StratifiedAlgebra& alg) {
  int q = 0;
  for (int j = 0; j < alg.step(); ++j) q += (j + 1) * alg.strata_dims()[j];
  return q;
}

Vec bch_product(const StratifiedAlgebra& alg, const Vec& a, const Vec& b) {
  if (alg.step() > 4)
    fail(ErrorKind::Unsupported,
         "BCH product implemented through nilpotency step 4");
  Vec r = a + b;
  if (alg.step() < 2) return r;
  const Vec ab = alg.bracket(a, b);
  r += 0.5 * ab;
  if (alg.step() < 3) return r;
  const Vec aab = alg.bracket(a, ab);
  const Vec bab = alg.bracket(b, ab);
  r += (1.0 / 12.0) * aab;
  r += (-1.0 / 12.0) * bab;
  if (alg.step() < 4) return r;
  r += (-1.0 / 24.0) * alg.bracket(b, aab);
  return r;
}

Vec group_multiply(const StratifiedAlgebra& alg, const Vec& g, const Vec& h) {
  return bch_product(alg, g, h);
}

Vec group_inverse(const StratifiedAlgebra&, const Vec& g) { return -g; }

Vec dilate(const StratifiedAlgebra& alg, const Vec& g, double lambda) {
  if (!(lambda > 0.0))
    fail(ErrorKind::Domain, "dilation parameter must be positive");
  Vec r(alg.dim());
  for (int i = 0; i < alg.dim(); ++i) {
    double f = lambda;
    for (int s = 1; s < alg.stratum(i); ++s) f *= lambda;
    r.a[i] = f * g.a[i];
  }
  return r;
}

namespace {

// [u, w] with polynomial component vectors.
std::vector<Polynomial> bracket_polys(const StratifiedAlgebra& alg,
                                      const std::vector<Polynomial>& u,
                                      const std::vector<Polynomial>& w) {
  const int n = alg.dim();
  std::vector<Polynomial> r(n, Polynomial(n));
  for (int l = 0; l < n; ++l) {
    if (u[l].is_zero()) continue;
    for (int m = 0; m < n; ++m) {
      if (w[m].is_zero()) continue;
      const Polynomial prod = u[l] * w[m];
      for (int k = 0; k < n; ++k) {
        const double ck = alg.c(l, m, k);
        if (ck != 0.0) r[k] = r[k] + prod * ck;
      }
    }
  }
  return r;
}

} // namespace

std::vector<Polynomial> left_invariant_field_polys(const StratifiedAlgebra& alg,
                                                   int i) {
  const int n = alg.dim();
  if (alg.step() > 4)
    fail(ErrorKind::Unsupported,
         "left-invariant fields implemented through nilpotency step 4");
  std::vector<Polynomial> g(n, Polynomial(n)), ei(n, Polynomial(n));
  for (int k = 0; k < n; ++k) g[k] = Polynomial::coordinate(n, k);
  ei[i] = Polynomial::constant(n, 1.0);

  std::vector<Polynomial> r = ei;
  const std::vector<Polynomial> gei = bracket_polys(alg, g, ei);
  for (int k = 0; k < n; ++k) r[k] = r[k] + gei[k] * 0.5;
  if (alg.step() >= 3) {
    const std::vector<Polynomial> ggei = bracket_polys(alg, g, gei);
    for (int k = 0; k < n; ++k) r[k] = r[k] + ggei[k] * (1.0 / 12.0);
  }
  // The ad_g^3 term has Bernoulli coefficient B_3/3! = 0 and ad_g^4 vanishes
  // for step <= 4, so nothing further is needed.
  return r;
}

Vec left_invariant_field(const StratifiedAlgebra& alg, int i, const Vec& g) {
  const auto polys = left_invariant_field_polys(alg, i);
  Vec r(alg.dim());
  for (int k = 0; k < alg.dim(); ++k) r.a[k] = polys[k].eval(g);
  return r;
}

} // namespace freqlab
