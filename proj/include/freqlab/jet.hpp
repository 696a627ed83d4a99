#pragma once

#include <array>
#include <cmath>

#include "freqlab/errors.hpp"
#include "freqlab/vec.hpp"

namespace freqlab {

/// Truncated Taylor expansion of order <= 2 at a point: value, gradient and
/// symmetric Hessian over all group coordinates. `ord` records how many
/// derivative levels are trustworthy; fields built from |grad rho|^2 carry
/// ord = 1 (their Hessian would need third derivatives of the gauge, which
/// no formula in scope requires).
struct Jet {
  int n = 0;
  int ord = 2;
  double v = 0.0;
  std::array<double, kMaxDim> d{};
  std::array<double, kMaxDim * kMaxDim> hh{};

  double h(int i, int j) const { return hh[i * kMaxDim + j]; }
  double& h(int i, int j) { return hh[i * kMaxDim + j]; }

  static Jet constant(int n, double c) {
    Jet j;
    j.n = n;
    j.v = c;
    return j;
  }
  static Jet coordinate(int n, int i, double value) {
    Jet j;
    j.n = n;
    j.v = value;
    j.d[i] = 1.0;
    return j;
  }
  /// Jet of the identity chart at x, one per coordinate, is built on demand;
  /// this gathers the gradient as a Vec.
  Vec gradient() const {
    Vec g(n);
    for (int i = 0; i < n; ++i) g.a[i] = d[i];
    return g;
  }

  void require_order(int k, const char* who) const {
    if (ord < k)
      fail(ErrorKind::Domain,
           std::string(who) + " needs a jet of order " + std::to_string(k));
  }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);
Jet operator+(const Jet& a, double c);
Jet operator-(const Jet& a, double c);

/// Composition with a scalar function given by (f, f', f'') at a.v.
Jet chain(const Jet& a, double f, double df, double ddf);

Jet jet_pow(const Jet& a, double p); // requires a.v > 0 for non-integer p
Jet jet_sqrt(const Jet& a);
Jet jet_exp(const Jet& a);
Jet jet_log(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);

} // namespace freqlab
