#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freqlab/polynomial.hpp"
#include "freqlab/vec.hpp"

namespace freqlab {

/// Stratified nilpotent Lie algebra given by dense structure constants
/// c^k_{ij} over a graded basis: [e_i, e_j] = sum_k c^k_{ij} e_k.
/// Basis element i carries stratum(i) in {1..step}.
class StratifiedAlgebra {
public:
  StratifiedAlgebra(int step, std::vector<int> strata_dims);

  /// Abelian R^n: one stratum, all brackets zero.
  static StratifiedAlgebra euclidean(int n);
  /// Heisenberg H^n in the convention [e_i, e_{n+i}] = -4 e_{2n+1}.
  static StratifiedAlgebra heisenberg(int n);
  /// Parses {"step": h, "strata": [m_1..], "brackets": [{i,j,k,c}...]}
  /// (indices 0-based).
  static StratifiedAlgebra from_json_text(const std::string& text);
  /// Built-in ids "euclidean:n", "heisenberg:n"; otherwise a JSON file path.
  static StratifiedAlgebra from_id(const std::string& id);

  int step() const { return step_; }
  int dim() const { return dim_; }
  const std::vector<int>& strata_dims() const { return strata_; }
  /// Stratum (1-based weight) of basis element i.
  int stratum(int i) const { return stratum_[i]; }
  /// Dimension of the horizontal layer V_1.
  int horizontal_dim() const { return strata_[0]; }

  double c(int i, int j, int k) const { return c_[(i * dim_ + j) * dim_ + k]; }
  void set_bracket(int i, int j, int k, double value);

  Vec bracket(const Vec& a, const Vec& b) const;

  std::string id() const { return id_; }
  void set_id(const std::string& id) { id_ = id; }

private:
  int step_;
  std::vector<int> strata_;
  int dim_;
  std::vector<int> stratum_;
  std::vector<double> c_;
  std::string id_;
};

struct ValidationIssue {
  std::string invariant; // "antisymmetry", "jacobi", "grading", "generation"
  int i = -1, j = -1, k = -1;
  double magnitude = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Checks antisymmetry, the Jacobi identity on all basis triples, the grading
/// rule, and Hoermander generation of each stratum from the one below it.
ValidationReport validate_algebra(const StratifiedAlgebra& alg);

/// Q = sum_j j * m_j.
int homogeneous_dimension(const StratifiedAlgebra& alg);

/// Baker-Campbell-Hausdorff product, exact for nilpotency step <= 4 (the
/// series truncates by nilpotency; terms through 4-fold brackets are coded).
Vec bch_product(const StratifiedAlgebra& alg, const Vec& a, const Vec& b);

/// Group operations in exponential coordinates of the first kind.
Vec group_multiply(const StratifiedAlgebra& alg, const Vec& g, const Vec& h);
Vec group_inverse(const StratifiedAlgebra& alg, const Vec& g);

/// Anisotropic dilation: stratum-j coordinates scale by lambda^j.
Vec dilate(const StratifiedAlgebra& alg, const Vec& g, double lambda);

/// Coefficients of the left-invariant field X_i at g, as polynomials in g:
/// X_i(g) = sum_k a_k(g) d/dx_k with a = dL_g(e_i). In exponential
/// coordinates a(g) = e_i + (1/2)[g,e_i] + (1/12)[g,[g,e_i]] (the ad^3 term
/// has Bernoulli coefficient zero and ad^4 vanishes for step <= 4).
std::vector<Polynomial> left_invariant_field_polys(const StratifiedAlgebra& alg,
                                                   int i);

/// The same coefficients evaluated at a point.
Vec left_invariant_field(const StratifiedAlgebra& alg, int i, const Vec& g);

} // namespace freqlab
