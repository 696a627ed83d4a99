#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "freqlab/vec.hpp"

namespace freqlab {

/// Exponent tuple for one monomial; index i holds the power of coordinate i.
using Exponents = std::array<std::uint8_t, kMaxDim>;

/// Sparse multivariate polynomial with double coefficients, keyed by exponent
/// tuples. This is the exact-arithmetic backbone for left-invariant vector
/// field coefficients: their partial derivatives feed the sub-Laplacian, so
/// they are differentiated symbolically, never by finite differences.
class Polynomial {
public:
  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial coordinate(int nvars, int i);
  /// Monomial c * prod_i x_i^{e_i}.
  static Polynomial monomial(int nvars, const Exponents& e, double c);

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  std::size_t term_count() const { return terms_.size(); }

  void add_term(const Exponents& e, double c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  /// Exact partial derivative d/dx_i.
  Polynomial derivative(int i) const;

  double eval(const Vec& x) const;

  /// Max |coefficient| difference, for equality checks in tests.
  double max_coeff_delta(const Polynomial& o) const;

  std::string to_string() const;

  const std::map<Exponents, double>& terms() const { return terms_; }

private:
  int nvars_ = 0;
  std::map<Exponents, double> terms_; // deterministic iteration order
};

/// Flattened copy of a polynomial for evaluation in hot loops.
class CompiledPoly {
public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Polynomial& p);

  double eval(const Vec& x) const {
    double s = 0.0;
    for (const Term& t : terms_) {
      double m = t.c;
      for (int i = 0; i < nv_; ++i) {
        switch (t.e[i]) {
          case 0: break;
          case 1: m *= x.a[i]; break;
          case 2: m *= x.a[i] * x.a[i]; break;
          default: {
            double p = 1.0;
            for (int k = 0; k < t.e[i]; ++k) p *= x.a[i];
            m *= p;
          }
        }
      }
      s += m;
    }
    return s;
  }

  bool empty() const { return terms_.empty(); }

private:
  struct Term {
    double c;
    Exponents e;
  };
  int nv_ = 0;
  std::vector<Term> terms_;
};

} // namespace freqlab
