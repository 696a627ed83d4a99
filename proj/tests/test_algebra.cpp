#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "freqlab/algebra.hpp"
#include "freqlab/errors.hpp"

using namespace freqlab;

namespace {

Vec random_vec(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v.a[i] = uni(rng);
  return v;
}

} // namespace

TEST_CASE("abelian algebra is valid and Q = n") {
  const auto alg = StratifiedAlgebra::euclidean(5);
  CHECK(validate_algebra(alg).ok());
  CHECK(homogeneous_dimension(alg) == 5);
}

TEST_CASE("heisenberg algebra validates, Q = 2n+2") {
  for (int n = 1; n <= 3; ++n) {
    const auto alg = StratifiedAlgebra::heisenberg(n);
    const auto rep = validate_algebra(alg);
    INFO(rep.summary());
    CHECK(rep.ok());
    CHECK(homogeneous_dimension(alg) == 2 * n + 2);
  }
}

TEST_CASE("symmetric structure tensor is reported as antisymmetry violation") {
  StratifiedAlgebra alg(2, {2, 1});
  alg.set_bracket(0, 1, 2, -4.0);
  alg.set_bracket(1, 0, 2, -4.0); // wrong sign
  const auto rep = validate_algebra(alg);
  CHECK(!rep.ok());
  bool antisym = false;
  for (const auto& issue : rep.issues)
    if (issue.invariant == "antisymmetry") antisym = true;
  CHECK(antisym);
}

TEST_CASE("dropping the generating bracket fails Hoermander generation") {
  StratifiedAlgebra alg(2, {2, 1}); // all brackets zero
  const auto rep = validate_algebra(alg);
  bool generation = false;
  for (const auto& issue : rep.issues)
    if (issue.invariant == "generation") generation = true;
  CHECK(generation);
}

TEST_CASE("grading violations are caught") {
  StratifiedAlgebra alg(2, {2, 1});
  alg.set_bracket(0, 1, 0, 1.0); // bracket of V1,V1 landing in V1
  alg.set_bracket(1, 0, 0, -1.0);
  const auto rep = validate_algebra(alg);
  bool grading = false;
  for (const auto& issue : rep.issues)
    if (issue.invariant == "grading") grading = true;
  CHECK(grading);
}

TEST_CASE("bch on abelian algebra is plain addition") {
  const auto alg = StratifiedAlgebra::euclidean(4);
  std::mt19937_64 rng(11);
  const Vec a = random_vec(4, rng), b = random_vec(4, rng);
  const Vec c = bch_product(alg, a, b);
  for (int i = 0; i < 4; ++i) CHECK(c.a[i] == doctest::Approx(a.a[i] + b.a[i]));
}

TEST_CASE("bch reproduces the H^1 group law") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  const Vec p = bch_product(alg, Vec{1, 0, 0}, Vec{0, 1, 0});
  CHECK(p.a[0] == doctest::Approx(1.0));
  CHECK(p.a[1] == doctest::Approx(1.0));
  CHECK(p.a[2] == doctest::Approx(-2.0));

  // group law: t + t' + 2(x'.y - x.y')
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec g = random_vec(3, rng), h = random_vec(3, rng);
    const Vec gh = group_multiply(alg, g, h);
    CHECK(gh.a[0] == doctest::Approx(g.a[0] + h.a[0]));
    CHECK(gh.a[1] == doctest::Approx(g.a[1] + h.a[1]));
    const double t_expected =
        g.a[2] + h.a[2] + 2.0 * (h.a[0] * g.a[1] - g.a[0] * h.a[1]);
    CHECK(gh.a[2] == doctest::Approx(t_expected).epsilon(1e-12));
  }
}

TEST_CASE("group axioms hold numerically") {
  for (const auto& alg :
       {StratifiedAlgebra::heisenberg(2), StratifiedAlgebra::euclidean(3)}) {
    std::mt19937_64 rng(17);
    const int n = alg.dim();
    for (int trial = 0; trial < 40; ++trial) {
      const Vec a = random_vec(n, rng), b = random_vec(n, rng),
                c = random_vec(n, rng);
      CHECK(max_abs(bch_product(alg, a, -a)) < 1e-14);
      CHECK(max_abs(group_multiply(alg, a, Vec::zero(n)) - a) < 1e-14);
      const Vec left = group_multiply(alg, group_multiply(alg, a, b), c);
      const Vec right = group_multiply(alg, a, group_multiply(alg, b, c));
      CHECK(max_abs(left - right) < 1e-12);
      const Vec inv1 = group_inverse(alg, group_multiply(alg, a, b));
      const Vec inv2 =
          group_multiply(alg, group_inverse(alg, b), group_inverse(alg, a));
      CHECK(max_abs(inv1 - inv2) < 1e-12);
    }
  }
}

TEST_CASE("dilations scale strata and are automorphisms") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  const Vec d = dilate(alg, Vec{1, 1, 1}, 2.0);
  CHECK(d.a[0] == doctest::Approx(2.0));
  CHECK(d.a[1] == doctest::Approx(2.0));
  CHECK(d.a[2] == doctest::Approx(4.0));
  CHECK(max_abs(dilate(alg, Vec{0.3, -0.4, 0.2}, 1.0) - Vec{0.3, -0.4, 0.2}) ==
        0.0);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> lam(0.2, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec a = random_vec(3, rng), b = random_vec(3, rng);
    const double l = lam(rng);
    const Vec lhs = dilate(alg, group_multiply(alg, a, b), l);
    const Vec rhs = group_multiply(alg, dilate(alg, a, l), dilate(alg, b, l));
    CHECK(max_abs(lhs - rhs) < 1e-12);
  }

  CHECK_THROWS_AS(dilate(alg, Vec{1, 0, 0}, 0.0), Error);
  CHECK_THROWS_AS(dilate(alg, Vec{1, 0, 0}, -2.0), Error);
}

TEST_CASE("left-invariant fields match the H^1 frame") {
  const auto alg = StratifiedAlgebra::heisenberg(1);
  const Vec at_e = left_invariant_field(alg, 0, Vec::zero(3));
  CHECK(at_e.a[0] == doctest::Approx(1.0));
  CHECK(at_e.a[1] == 0.0);
  CHECK(at_e.a[2] == 0.0);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec g = random_vec(3, rng);
    const Vec X = left_invariant_field(alg, 0, g);
    const Vec Y = left_invariant_field(alg, 1, g);
    CHECK(X.a[0] == doctest::Approx(1.0));
    CHECK(X.a[1] == doctest::Approx(0.0));
    CHECK(X.a[2] == doctest::Approx(2.0 * g.a[1]));
    CHECK(Y.a[0] == doctest::Approx(0.0));
    CHECK(Y.a[1] == doctest::Approx(1.0));
    CHECK(Y.a[2] == doctest::Approx(-2.0 * g.a[0]));
  }
}

TEST_CASE("realized field commutator matches the structure constant") {
  // [X1, Y1] = -4 d_t as first-order operators, checked on the coefficient
  // polynomials themselves.
  const auto alg = StratifiedAlgebra::heisenberg(1);
  const auto X = left_invariant_field_polys(alg, 0);
  const auto Y = left_invariant_field_polys(alg, 1);
  for (int l = 0; l < 3; ++l) {
    Polynomial comm(3);
    for (int k = 0; k < 3; ++k) {
      comm = comm + X[k] * Y[l].derivative(k);
      comm = comm - Y[k] * X[l].derivative(k);
    }
    const Polynomial expected =
        l == 2 ? Polynomial::constant(3, -4.0) : Polynomial(3);
    CHECK(comm.max_coeff_delta(expected) < 1e-10);
  }
}

TEST_CASE("algebra loads from JSON document") {
  const std::string doc = R"({
    "step": 2, "strata": [2, 1],
    "brackets": [{"i":0,"j":1,"k":2,"c":-4.0},{"i":1,"j":0,"k":2,"c":4.0}]
  })";
  const auto alg = StratifiedAlgebra::from_json_text(doc);
  CHECK(validate_algebra(alg).ok());
  CHECK(homogeneous_dimension(alg) == 4);
  CHECK(alg.c(0, 1, 2) == -4.0);

  CHECK_THROWS_AS(StratifiedAlgebra::from_json_text("{\"step\": 2}"), Error);
  CHECK_THROWS_AS(StratifiedAlgebra::from_id("unknown:thing"), Error);
}

TEST_CASE("steps above 4 are rejected by bch") {
  StratifiedAlgebra alg(5, {2, 1, 1, 1, 1});
  CHECK_THROWS_AS(bch_product(alg, Vec::zero(6), Vec::zero(6)), Error);
}
