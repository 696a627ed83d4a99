#include "freqlab/polynomial.hpp"

#include <cmath>
#include <sstream>

namespace freqlab {

namespace {
constexpr double kDropTol = 0.0; // keep exact zeros out, nothing else
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  if (c != 0.0) p.terms_[Exponents{}] = c;
  return p;
}

Polynomial Polynomial::coordinate(int nvars, int i) {
  Polynomial p(nvars);
  Exponents e{};
  e[i] = 1;
  p.terms_[e] = 1.0;
  return p;
}

Polynomial Polynomial::monomial(int nvars, const Exponents& e, double c) {
  Polynomial p(nvars);
  if (c != 0.0) p.terms_[e] = c;
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int i = 0; i < nvars_; ++i) s += e[i];
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (c == 0.0) return;
  double& slot = terms_[e];
  slot += c;
  if (std::abs(slot) <= kDropTol) terms_.erase(e);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e{};
      for (int i = 0; i < nvars_; ++i)
        e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) r.add_term(e, c * s);
  return r;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents d = e;
    d[i] = static_cast<std::uint8_t>(d[i] - 1);
    r.add_term(d, c * e[i]);
  }
  return r;
}

double Polynomial::eval(const Vec& x) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x.a[i];
    s += m;
  }
  return s;
}

double Polynomial::max_coeff_delta(const Polynomial& o) const {
  double d = 0.0;
  for (const auto& [e, c] : terms_) {
    auto it = o.terms_.find(e);
    d = std::max(d, std::abs(c - (it == o.terms_.end() ? 0.0 : it->second)));
  }
  for (const auto& [e, c] : o.terms_)
    if (!terms_.count(e)) d = std::max(d, std::abs(c));
  return d;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      os << "*x" << i;
      if (e[i] > 1) os << "^" << int(e[i]);
    }
  }
  return os.str();
}

CompiledPoly::CompiledPoly(const Polynomial& p) : nv_(p.nvars()) {
  for (const auto& [e, c] : p.terms()) terms_.push_back(Term{c, e});
}

} // namespace freqlab
