#include "freqlab/jet.hpp"

namespace freqlab {

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  r.ord = std::min(a.ord, b.ord);
  r.v += b.v;
  for (int i = 0; i < r.n; ++i) r.d[i] += b.d[i];
  if (r.ord >= 2)
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j) r.h(i, j) += b.h(i, j);
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  r.ord = std::min(a.ord, b.ord);
  r.v -= b.v;
  for (int i = 0; i < r.n; ++i) r.d[i] -= b.d[i];
  if (r.ord >= 2)
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j) r.h(i, j) -= b.h(i, j);
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.n = a.n;
  r.ord = std::min(a.ord, b.ord);
  r.v = a.v * b.v;
  for (int i = 0; i < r.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  if (r.ord >= 2)
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j)
        r.h(i, j) = a.h(i, j) * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] +
                    a.v * b.h(i, j);
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  // a/b = a * (1/b); 1/b via the chain rule.
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet operator*(double s, const Jet& a) {
  Jet r = a;
  r.v *= s;
  for (int i = 0; i < r.n; ++i) r.d[i] *= s;
  if (r.ord >= 2)
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j) r.h(i, j) *= s;
  return r;
}

Jet operator+(const Jet& a, double c) {
  Jet r = a;
  r.v += c;
  return r;
}

Jet operator-(const Jet& a, double c) {
  Jet r = a;
  r.v -= c;
  return r;
}

Jet chain(const Jet& a, double f, double df, double ddf) {
  Jet r;
  r.n = a.n;
  r.ord = a.ord;
  r.v = f;
  for (int i = 0; i < r.n; ++i) r.d[i] = df * a.d[i];
  if (r.ord >= 2)
    for (int i = 0; i < r.n; ++i)
      for (int j = 0; j < r.n; ++j)
        r.h(i, j) = ddf * a.d[i] * a.d[j] + df * a.h(i, j);
  return r;
}

Jet jet_pow(const Jet& a, double p) {
  const double f = std::pow(a.v, p);
  const double df = p * std::pow(a.v, p - 1.0);
  const double ddf = p * (p - 1.0) * std::pow(a.v, p - 2.0);
  return chain(a, f, df, ddf);
}

Jet jet_sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

Jet jet_exp(const Jet& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

Jet jet_log(const Jet& a) {
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}

Jet jet_sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}

Jet jet_cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}

} // namespace freqlab
