#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace freqlab {

/// Groups handled here are tiny (Heisenberg H^n up to n=4, Euclidean up to
/// R^10), so coordinate vectors live in a fixed-size array and never allocate.
inline constexpr int kMaxDim = 10;

/// Coordinate vector over the graded basis, in exponential coordinates of the
/// first kind. Used both for Lie-algebra elements and for group points (the
/// exponential map identifies the two layouts).
struct Vec {
  int n = 0;
  std::array<double, kMaxDim> a{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) { a.fill(0.0); }
  Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
    assert(n <= kMaxDim);
    int i = 0;
    for (double x : xs) a[i++] = x;
  }

  double& operator[](int i) { return a[i]; }
  double operator[](int i) const { return a[i]; }

  static Vec zero(int dim) { return Vec(dim); }
  static Vec unit(int dim, int i) {
    Vec v(dim);
    v.a[i] = 1.0;
    return v;
  }
  static Vec from(const std::vector<double>& xs) {
    Vec v(static_cast<int>(xs.size()));
    for (int i = 0; i < v.n; ++i) v.a[i] = xs[i];
    return v;
  }

  std::vector<double> to_vector() const { return {a.begin(), a.begin() + n}; }
};

inline Vec operator+(const Vec& x, const Vec& y) {
  Vec r(x.n);
  for (int i = 0; i < x.n; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
inline Vec operator-(const Vec& x, const Vec& y) {
  Vec r(x.n);
  for (int i = 0; i < x.n; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}
inline Vec operator-(const Vec& x) {
  Vec r(x.n);
  for (int i = 0; i < x.n; ++i) r.a[i] = -x.a[i];
  return r;
}
inline Vec operator*(double s, const Vec& x) {
  Vec r(x.n);
  for (int i = 0; i < x.n; ++i) r.a[i] = s * x.a[i];
  return r;
}
inline Vec& operator+=(Vec& x, const Vec& y) {
  for (int i = 0; i < x.n; ++i) x.a[i] += y.a[i];
  return x;
}

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (int i = 0; i < x.n; ++i) s += x.a[i] * y.a[i];
  return s;
}
inline double norm2(const Vec& x) { return dot(x, x); }
inline double norm(const Vec& x) { return std::sqrt(norm2(x)); }
inline double max_abs(const Vec& x) {
  double m = 0.0;
  for (int i = 0; i < x.n; ++i) m = std::max(m, std::abs(x.a[i]));
  return m;
}

/// Group points share the Vec layout; the alias keeps signatures readable.
using GroupPoint = Vec;
using AlgebraVector = Vec;

} // namespace freqlab
