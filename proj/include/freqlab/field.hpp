#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "freqlab/jet.hpp"
#include "freqlab/polynomial.hpp"
#include "freqlab/vec.hpp"

namespace freqlab {

/// A function on the group with exact 2-jet evaluation. Concrete fields are
/// closed forms or compositions assembled with jet arithmetic; jets are exact
/// (to rounding) for polynomials and for smooth closed forms away from their
/// singular sets.
class ScalarField {
public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual Jet jet(const Vec& x) const = 0;
  /// Plain value; overridden where a cheaper or more widely defined
  /// evaluation exists (series fields have a value at e, their jet does not).
  virtual double value(const Vec& x) const { return jet(x).v; }
};

using FieldPtr = std::shared_ptr<const ScalarField>;

class ConstantField final : public ScalarField {
public:
  ConstantField(int n, double c) : n_(n), c_(c) {}
  int dim() const override { return n_; }
  Jet jet(const Vec&) const override { return Jet::constant(n_, c_); }
  double value(const Vec&) const override { return c_; }

private:
  int n_;
  double c_;
};

class CoordinateField final : public ScalarField {
public:
  CoordinateField(int n, int axis) : n_(n), axis_(axis) {}
  int dim() const override { return n_; }
  Jet jet(const Vec& x) const override {
    return Jet::coordinate(n_, axis_, x.a[axis_]);
  }
  double value(const Vec& x) const override { return x.a[axis_]; }

private:
  int n_, axis_;
};

/// Polynomial field with symbolically precomputed first and second partials,
/// so jets are exact.
class PolynomialField final : public ScalarField {
public:
  explicit PolynomialField(const Polynomial& p);
  int dim() const override { return n_; }
  Jet jet(const Vec& x) const override;
  double value(const Vec& x) const override { return p_.eval(x); }
  const Polynomial& poly() const { return poly_; }

private:
  int n_;
  Polynomial poly_;
  CompiledPoly p_;
  std::vector<CompiledPoly> dp_;   // n entries
  std::vector<CompiledPoly> ddp_;  // upper triangle, row-major
};

// ---------------------------------------------------------------------------
// Combinators (used by tests, cutoff potentials and other cold paths; hot
// catalog fields implement fused jets directly).
// ---------------------------------------------------------------------------

FieldPtr make_constant(int n, double c);
FieldPtr make_coordinate(int n, int axis);
FieldPtr make_polynomial(const Polynomial& p);
FieldPtr field_sum(FieldPtr a, FieldPtr b);
FieldPtr field_product(FieldPtr a, FieldPtr b);
FieldPtr field_scale(double s, FieldPtr a);

/// One-dimensional C^2 function handed to compositions as (f, f', f'').
struct Curve {
  std::function<void(double, double&, double&, double&)> eval;
};

/// compose(curve, inner): x -> curve(inner(x)).
FieldPtr field_compose(Curve outer, FieldPtr inner);

/// Smooth bump exp(-1/((s-a)(b-s))) on (a,b), zero outside, C^infinity.
Curve bump_curve(double a, double b);

} // namespace freqlab
