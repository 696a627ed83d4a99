#include "freqlab/field.hpp"

#include <cmath>

namespace freqlab {

PolynomialField::PolynomialField(const Polynomial& p)
    : n_(p.nvars()), poly_(p), p_(p) {
  for (int i = 0; i < n_; ++i) dp_.emplace_back(p.derivative(i));
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j)
      ddp_.emplace_back(p.derivative(i).derivative(j));
}

Jet PolynomialField::jet(const Vec& x) const {
  Jet j;
  j.n = n_;
  j.v = p_.eval(x);
  for (int i = 0; i < n_; ++i) j.d[i] = dp_[i].eval(x);
  int idx = 0;
  for (int i = 0; i < n_; ++i)
    for (int k = i; k < n_; ++k) {
      const double v = ddp_[idx++].eval(x);
      j.h(i, k) = v;
      j.h(k, i) = v;
    }
  return j;
}

namespace {

class SumField final : public ScalarField {
public:
  SumField(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_->dim(); }
  Jet jet(const Vec& x) const override { return a_->jet(x) + b_->jet(x); }
  double value(const Vec& x) const override {
    return a_->value(x) + b_->value(x);
  }

private:
  FieldPtr a_, b_;
};

class ProductField final : public ScalarField {
public:
  ProductField(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return a_->dim(); }
  Jet jet(const Vec& x) const override { return a_->jet(x) * b_->jet(x); }
  double value(const Vec& x) const override {
    return a_->value(x) * b_->value(x);
  }

private:
  FieldPtr a_, b_;
};

class ScaledField final : public ScalarField {
public:
  ScaledField(double s, FieldPtr a) : s_(s), a_(std::move(a)) {}
  int dim() const override { return a_->dim(); }
  Jet jet(const Vec& x) const override { return s_ * a_->jet(x); }
  double value(const Vec& x) const override { return s_ * a_->value(x); }

private:
  double s_;
  FieldPtr a_;
};

class ComposedField final : public ScalarField {
public:
  ComposedField(Curve outer, FieldPtr inner)
      : outer_(std::move(outer)), inner_(std::move(inner)) {}
  int dim() const override { return inner_->dim(); }
  Jet jet(const Vec& x) const override {
    const Jet in = inner_->jet(x);
    double f, df, ddf;
    outer_.eval(in.v, f, df, ddf);
    return chain(in, f, df, ddf);
  }
  double value(const Vec& x) const override {
    double f, df, ddf;
    outer_.eval(inner_->value(x), f, df, ddf);
    return f;
  }

private:
  Curve outer_;
  FieldPtr inner_;
};

} // namespace

FieldPtr make_constant(int n, double c) {
  return std::make_shared<ConstantField>(n, c);
}
FieldPtr make_coordinate(int n, int axis) {
  return std::make_shared<CoordinateField>(n, axis);
}
FieldPtr make_polynomial(const Polynomial& p) {
  return std::make_shared<PolynomialField>(p);
}
FieldPtr field_sum(FieldPtr a, FieldPtr b) {
  return std::make_shared<SumField>(std::move(a), std::move(b));
}
FieldPtr field_product(FieldPtr a, FieldPtr b) {
  return std::make_shared<ProductField>(std::move(a), std::move(b));
}
FieldPtr field_scale(double s, FieldPtr a) {
  return std::make_shared<ScaledField>(s, std::move(a));
}
FieldPtr field_compose(Curve outer, FieldPtr inner) {
  return std::make_shared<ComposedField>(std::move(outer), std::move(inner));
}

Curve bump_curve(double a, double b) {
  Curve c;
  c.eval = [a, b](double s, double& f, double& df, double& ddf) {
    if (s <= a || s >= b) {
      f = df = ddf = 0.0;
      return;
    }
    const double p = (s - a) * (b - s);       // > 0 inside
    const double dp = (b - s) - (s - a);      // p'
    const double ddp = -2.0;                  // p''
    f = std::exp(-1.0 / p);
    // d/ds exp(-1/p) = f * p'/p^2
    const double q = dp / (p * p);
    df = f * q;
    // q' = p''/p^2 - 2 p'^2 / p^3
    const double dq = ddp / (p * p) - 2.0 * dp * dp / (p * p * p);
    ddf = f * (q * q + dq);
  };
  return c;
}

} // namespace freqlab
