#include <random>

#include "doctest.h"
#include "schauder/builtins.hpp"
#include "schauder/operator.hpp"

using namespace schauder;

namespace {

SPoly mono(const Gamma& g, std::vector<int> beta, Rational e, int log, int l, Rational c) {
  return SPoly::monomial(g, std::move(beta), std::move(e), log, l, std::move(c));
}

DegenerateOperator drift_only(const Gamma& g) {
  std::vector<std::vector<CoefficientSpec>> a(1, std::vector<CoefficientSpec>(1));
  std::vector<CoefficientSpec> b{CoefficientSpec(SPoly::constant(g, 0, 1))};
  return DegenerateOperator(g, std::move(a), std::move(b), CoefficientSpec(), 1.0, 1.0);
}

/// Two-dimensional operator with polynomial coefficients in (x_1, t).
DegenerateOperator variable_operator(const Gamma& g) {
  const SPoly one = SPoly::constant(g, 1, 1);
  const SPoly x1 = mono(g, {1}, 0, 0, 0, 1);
  const SPoly t = mono(g, {0}, 0, 0, 1, 1);
  std::vector<std::vector<CoefficientSpec>> a(2, std::vector<CoefficientSpec>(2));
  a[0][0] = one + scale(x1 * x1, Rational(1, 4));
  a[0][1] = scale(x1, Rational(1, 8));
  a[1][0] = scale(x1, Rational(1, 8));
  a[1][1] = one + scale(t, Rational(1, 3));
  std::vector<CoefficientSpec> b{CoefficientSpec(scale(t, Rational(1, 2))), CoefficientSpec(scale(x1, Rational(-1, 5)))};
  return DegenerateOperator(g, std::move(a), std::move(b), CoefficientSpec(scale(one, Rational(-1, 2))), 0.5, 2.0);
}

SPoly random_u(const Gamma& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(0, 2), coef(-4, 4);
  SPoly u(g, 1);
  for (int k = 0; k < 4; ++k)
    u = u + mono(g, {small(rng)}, g.sigma() * small(rng) + small(rng) + 1, 0, small(rng), coef(rng));
  return u;
}

}  // namespace

TEST_CASE("apply examples") {
  const Gamma g(Rational(1, 2));
  const auto L = DegenerateOperator::model(g);
  CHECK(apply(L, mono(g, {}, 2 - g.value(), 0, 0, 1)) == SPoly::constant(g, 0, (2 - g.value()) * (1 - g.value())));
  CHECK(apply(L, mono(g, {}, 1, 0, 0, 1)).empty());

  const Gamma one(Rational(1));
  CHECK(apply(DegenerateOperator::model(one), mono(one, {}, 1, 1, 0, 1)) == SPoly::constant(one, 0, 1));
}

TEST_CASE("residual examples") {
  for (const char* gs : {"-1", "0", "1/2", "1"}) {
    const Gamma g = Gamma::parse(gs);
    CHECK(residual(DegenerateOperator::model(g), model_oracle(g), SPoly::constant(g, 0, 1)).empty());
    CHECK(residual(DegenerateOperator::model(g), SPoly(g, 0), SPoly(g, 0)).empty());
  }
  const Gamma g(Rational(1, 2));
  CHECK(residual(drift_only(g), mono(g, {}, 1, 0, 0, 1), SPoly(g, 0)) == mono(g, {}, 1 - g.sigma(), 0, 0, -1));
}

TEST_CASE("the three-term polynomial leaves exactly the last oracle term") {
  const Gamma g(Rational(1, 2));
  const SPoly diff = model_oracle(g) - model_three_term(g);
  CHECK(diff == mono(g, {}, 4, 0, 0, Rational(1, 45)));
}

TEST_CASE("eval_coefficients examples") {
  const Gamma g(Rational(1, 2));
  const auto L = DegenerateOperator::constant(g, {{2, Rational(1, 2)}, {Rational(1, 2), 3}}, {1, 4}, -1, 0.5, 4);
  const auto s = eval_coefficients(L, Point{{0.1}, 0.25, 0.3});
  CHECK(s.a_at(0, 0) == 2);
  CHECK(s.a_weighted_at(1, 1) == doctest::Approx(3 * 0.5));
  CHECK(s.a_weighted_at(0, 1) == doctest::Approx(0.5 * std::pow(0.25, 0.25)));
  CHECK(s.b_weighted[1] == doctest::Approx(4 * std::pow(0.25, 0.25)));
  CHECK(s.c == -1);

  const auto at_one = eval_coefficients(L, Point{{0.0}, 1.0, 0.0});
  CHECK(at_one.a_weighted_at(1, 1) == at_one.a_at(1, 1));
  CHECK(at_one.b_weighted[1] == at_one.b[1]);

  const Gamma m1(Rational(-1));
  const auto Ls = DegenerateOperator::constant(m1, {{1}}, {1}, 0, 1, 1);
  const auto sing = eval_coefficients(Ls, Point{{}, 0.0, 0.0});
  CHECK(sing.singular_at(0, 0));
  CHECK(sing.b_singular[0]);
}

TEST_CASE("apply is linear") {
  const Gamma g(Rational(1, 3));
  const auto L = variable_operator(g);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const SPoly p = random_u(g, rng), q = random_u(g, rng);
    CHECK(apply(L, p + q) == apply(L, p) + apply(L, q));
    CHECK(apply(L, scale(p, Rational(-7, 3))) == scale(apply(L, p), Rational(-7, 3)));
  }
}

TEST_CASE("image exponents come from e, e - sigma, e - 2 sigma shifted by coefficient exponents") {
  const Gamma g(Rational(1, 2));
  const auto L = variable_operator(g);
  const SPoly u = mono(g, {1}, Rational(7, 4), 0, 1, 1);
  const SPoly image = apply(L, u);
  REQUIRE_FALSE(image.empty());
  for (const auto& [key, c] : image.terms()) {
    const bool ok = key.e == Rational(7, 4) || key.e == Rational(7, 4) - g.sigma() || key.e == Rational(7, 4) - 2 * g.sigma();
    CHECK(ok);
  }
}

TEST_CASE("symbolic application agrees with numeric assembly") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* gs : {"-1", "1/2", "1/3"}) {
    const Gamma g = Gamma::parse(gs);
    const auto L = variable_operator(g);
    for (int trial = 0; trial < 10; ++trial) {
      const SPoly u = random_u(g, rng);
      const std::vector<Direction> dir{Direction::tangential(0), Direction::normal()};
      for (int k = 0; k < 5; ++k) {
        const Point X{{unit(rng) - 0.5}, 0.1 + 0.9 * unit(rng), unit(rng)};
        const auto s = eval_coefficients(L, X);
        double Lu = s.c * u.evaluate(X);
        for (int i = 0; i < 2; ++i) {
          Lu += s.b_weighted[i] * differentiate(u, dir[i]).evaluate(X);
          for (int j = 0; j < 2; ++j) Lu += s.a_weighted_at(i, j) * differentiate(differentiate(u, dir[i]), dir[j]).evaluate(X);
        }
        const double symbolic = apply(L, u).evaluate(X);
        CHECK(symbolic == doctest::Approx(Lu).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("numeric coefficients are rejected by symbolic application") {
  const Gamma g(Rational(1, 2));
  std::vector<std::vector<CoefficientSpec>> a(1, std::vector<CoefficientSpec>(1));
  a[0][0] = CoefficientSpec(Field([](const Point&) { return 1.0; }));
  const DegenerateOperator L(g, std::move(a), std::vector<CoefficientSpec>(1), CoefficientSpec(), 1, 1);
  CHECK_FALSE(L.is_symbolic());
  CHECK_THROWS_AS(apply(L, mono(g, {}, 1, 0, 0, 1)), UnsupportedError);
}

TEST_CASE("validation by sampling") {
  const Gamma g(Rational(1, 2));
  CHECK(validate(variable_operator(g)).ok);
  CHECK(validate(cev_operator(g)).ok);
  const auto bad_c = DegenerateOperator::constant(g, {{1}}, {0}, 1, 1, 1);
  CHECK_FALSE(validate(bad_c).ok);
  CHECK_THROWS_AS(require_valid(bad_c), InvalidOperatorError);
  const auto degenerate = DegenerateOperator::constant(g, {{Rational(1, 10)}}, {0}, 0, 1, 1);
  CHECK_FALSE(validate(degenerate).ok);
}
