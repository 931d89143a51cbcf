#include <random>

#include "doctest.h"
#include "schauder/builtins.hpp"
#include "schauder/expansion.hpp"

using namespace schauder;

namespace {

SPoly mono(const Gamma& g, std::vector<int> beta, Rational e, int log, int l, Rational c) {
  return SPoly::monomial(g, std::move(beta), std::move(e), log, l, std::move(c));
}

Rational min_exponent(const SPoly& p) { return p.empty() ? Rational(1000) : *p.min_exponent(); }

/// Dense T^m read off the displayed matrix, row by row.
std::vector<std::vector<Rational>> dense_T(int m) {
  std::vector<std::vector<Rational>> T(m + 1, std::vector<Rational>(m + 1, Rational(0)));
  for (int row = 0; row <= m; ++row) {
    T[row][row] = row == m ? Rational((m + 1) * (m + 1)) : Rational((row + 1) * (m + 1));
    if (row > 0) T[row][row - 1] = make_rational(m * (m + 2), 4);
    if (row < m) T[row][row + 1] = Rational((row + 1) * (row + 2));
  }
  return T;
}

Rational gaussian_determinant(std::vector<std::vector<Rational>> A) {
  const std::size_t n = A.size();
  Rational det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && A[pivot][col] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != col) {
      std::swap(A[pivot], A[col]);
      det = -det;
    }
    det *= A[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Rational f = A[r][col] / A[col][col];
      for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
    }
  }
  return det;
}

CoefficientFunction random_coefficient(const Gamma& g, std::size_t dims, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 2), num(-6, 6), den(1, 4);
  CoefficientFunction c(g, dims);
  for (int k = 0; k < 3; ++k) {
    std::vector<int> beta(dims, 0);
    for (auto& b : beta) b = deg(rng);
    c = c + mono(g, beta, 0, 0, deg(rng) % 2, make_rational(num(rng), den(rng)));
  }
  return c;
}

/// Variable-coefficient operator in (x_1, x_n) whose a^{nn} trace is constant.
DegenerateOperator variable_operator(const Gamma& g) {
  const auto C = [&](Rational v) { return SPoly::constant(g, 1, v); };
  const SPoly x1 = mono(g, {1}, 0, 0, 0, 1), t = mono(g, {0}, 0, 0, 1, 1), ys = mono(g, {0}, g.sigma(), 0, 0, 1);
  std::vector<std::vector<CoefficientSpec>> a(2, std::vector<CoefficientSpec>(2));
  a[0][0] = C(1) + scale(t, Rational(1, 4));
  a[0][1] = a[1][0] = scale(x1, Rational(1, 8));
  a[1][1] = C(1) + scale(x1 * ys, Rational(1, 4)) + scale(t * mono(g, {0}, 1, 0, 0, 1), Rational(1, 5));
  std::vector<CoefficientSpec> b{CoefficientSpec(scale(x1, Rational(1, 3))), CoefficientSpec(C(Rational(1, 2)) + t * ys)};
  return DegenerateOperator(g, std::move(a), std::move(b), CoefficientSpec(C(Rational(-1, 2)) + x1 * t), 0.5, 2);
}

Expansion random_forcing(const Gamma& g, std::mt19937_64& rng, const Rational& kappa) {
  Expansion f(g, 1);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      const Rational e = g.sigma() * j + i;
      if (e >= g.sigma() * kappa) continue;
      f.add(random_coefficient(g, 1, rng), e, 0);
      if (g.is_log_case() && 2 * e >= 1) f.add(random_coefficient(g, 1, rng), e, 1);
    }
  return f;
}

}  // namespace

TEST_CASE("T^m matches the displayed matrix") {
  const auto T1 = tridiagonal_T(1);
  CHECK(T1.at(0, 0) == 2);
  CHECK(T1.at(0, 1) == 2);
  CHECK(T1.at(1, 0) == Rational(3, 4));
  CHECK(T1.at(1, 1) == 4);
  for (int m = 1; m <= 12; ++m) {
    const auto T = tridiagonal_T(m);
    const auto D = dense_T(m);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) CHECK(T.at(i, j) == D[i][j]);
  }
}

TEST_CASE("solve_T examples") {
  const auto x = solve_T(1, {Rational(1), Rational(0)});
  CHECK(x == std::vector<Rational>{Rational(8, 13), Rational(-3, 26)});
  const auto z = solve_T(4, std::vector<Rational>(5, Rational(0)));
  for (const auto& v : z) CHECK(v == 0);
}

TEST_CASE("T^m is nonsingular for m <= 50 and solves exactly") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-9, 9);
  for (int m = 1; m <= 50; ++m) {
    const auto D = dense_T(m);
    const Rational det = gaussian_determinant(D);
    CHECK(det != 0);
    CHECK(tridiagonal_T(m).determinant() == det);
    std::vector<Rational> rhs(m + 1);
    for (auto& v : rhs) v = make_rational(num(rng), 7);
    const auto x = solve_T(m, rhs);
    for (int i = 0; i <= m; ++i) {
      Rational s(0);
      for (int j = 0; j <= m; ++j) s += D[i][j] * x[j];
      CHECK(s == rhs[i]);
    }
  }
}

TEST_CASE("degree set and resonance") {
  const Gamma g(Rational(1, 2));
  CHECK(in_degree_set(Rational(7, 3), g));
  CHECK_FALSE(in_degree_set(Rational(5, 2), g));
  CHECK_NOTHROW(require_nonresonant_kappa(Rational(5, 2), g));
  CHECK_THROWS_AS(require_nonresonant_kappa(Rational(7, 3), g), ResonanceError);
  CHECK_THROWS_AS(require_nonresonant_kappa(Rational(3), g), ResonanceError);
  CHECK_THROWS_AS(require_nonresonant_kappa(Rational(3, 2), g), ResonanceError);
  CHECK_THROWS_AS(particular_solution(DegenerateOperator::model(g), Expansion(g, 0), Rational(3)), ResonanceError);
}

TEST_CASE("homogeneous hierarchy examples") {
  const Gamma g0(Rational(0));
  const Rational beta(3, 5);
  const auto L = DegenerateOperator::constant(g0, {{1}}, {beta}, 0, 1, 1);
  const Expansion v = homogeneous_hierarchy(L, SPoly::constant(g0, 0, 1), 4);
  CHECK(v.coefficient(Rational(2)) == SPoly::constant(g0, 0, -beta / 2));

  const Gamma g(Rational(1, 2));
  const auto L2 = DegenerateOperator::constant(g, {{1, 0}, {0, 2}}, {0, 0}, 0, 1, 2);
  const Expansion w = homogeneous_hierarchy(L2, SPoly::constant(g, 1, 5), 6);
  CHECK(w.flatten() == mono(g, {0}, 1, 0, 0, 5));

  CHECK(homogeneous_hierarchy(L2, SPoly(g, 1), 6).empty());
  CHECK_THROWS_AS(homogeneous_hierarchy(DegenerateOperator::model(Gamma(Rational(1))), SPoly::constant(Gamma(Rational(1)), 0, 1), 3),
                  UnsupportedError);
  const auto bad = DegenerateOperator::constant(g, {{-1}}, {0}, 0, 1, 1);
  CHECK_THROWS_AS(homogeneous_hierarchy(bad, SPoly::constant(g, 0, 1), 3), InvalidOperatorError);
}

TEST_CASE("hierarchy cancels below 1 + sigma (N - 1) and agrees with the interior engine") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> diag(6, 12), off(-2, 2), drift(-8, 8), reac(-8, 0);
  for (const char* gs : {"-1", "0", "1/2"}) {
    const Gamma g = Gamma::parse(gs);
    for (int trial = 0; trial < 4; ++trial) {
      const Rational a12 = make_rational(off(rng), 8);
      const auto L = DegenerateOperator::constant(g, {{make_rational(diag(rng), 8), a12}, {a12, make_rational(diag(rng), 8)}},
                                                  {make_rational(drift(rng), 8), make_rational(drift(rng), 8)}, make_rational(reac(rng), 8),
                                                  0.5, 2.0);
      const CoefficientFunction U0 = random_coefficient(g, 1, rng);
      INFO("U0 = ", to_display_string(U0), " a12 = ", to_string(a12));
      for (int N = 1; N <= 5; ++N) {
        const Expansion v = homogeneous_hierarchy(L, U0, N);
        const SPoly R = residual(L, v.flatten(), SPoly(g, 1));
        CHECK(min_exponent(R) >= 1 + g.sigma() * (N - 1));
        CHECK(interior_expansion(L, U0, 1, N + 1).flatten() == v.flatten());
      }
    }
  }
}

TEST_CASE("particular solution examples") {
  for (const char* gs : {"-1", "0", "1/2"}) {
    const Gamma g = Gamma::parse(gs);
    const Rational p(3, 2), f00(5);
    const auto L = DegenerateOperator::constant(g, {{p}}, {0}, 0, 1, 2);
    Expansion f(g, 0);
    f.add(SPoly::constant(g, 0, f00), 0);
    const Expansion h = particular_solution(L, f, Rational(5, 2));
    const Rational s = 2 - g.value();
    CHECK(h.flatten() == mono(g, {}, s, 0, 0, -f00 / (s * (1 - g.value()) * p)));
    CHECK(residual(L, h.flatten(), f.flatten()).empty());
  }
  const Gamma one(Rational(1));
  const auto L = DegenerateOperator::constant(one, {{2}}, {0}, 0, 1, 2);
  Expansion f(one, 0);
  f.add(SPoly::constant(one, 0, 3), 0);
  const Expansion h = particular_solution(L, f, Rational(5, 2));
  CHECK(h.flatten() == mono(one, {}, 1, 1, 0, Rational(-3, 2)));
  CHECK(particular_solution(L, Expansion(one, 0), Rational(5, 2)).empty());
}

TEST_CASE("particular solution reproduces the oracle's stationary term") {
  for (const char* gs : {"-1", "0", "1/2", "1"}) {
    const Gamma g = Gamma::parse(gs);
    Expansion f(g, 0);
    f.add(SPoly::constant(g, 0, 1), 0);
    const SPoly h = particular_solution(DegenerateOperator::model(g), f, Rational(9, 2)).flatten();
    const SPoly oracle = model_oracle(g);
    const Rational e = 2 - g.value();
    const int log = g.is_log_case() ? 1 : 0;
    const MonomialKey key{{}, g.is_log_case() ? Rational(1) : e, log, 0};
    CHECK(h.coefficient(key) == oracle.coefficient(key));
    CHECK(h.size() == 1);
  }
}

TEST_CASE("particular solution cancels below sigma (kappa - 2)") {
  std::mt19937_64 rng(5);
  for (const char* gs : {"-1", "0", "1/2", "1"}) {
    const Gamma g = Gamma::parse(gs);
    const auto L = variable_operator(g);
    for (const Rational& kappa : {Rational(5, 2), Rational(9, 2)}) {
      const Expansion f = random_forcing(g, rng, kappa);
      const Construction c = construct_particular_solution(L, f, kappa);
      const SPoly R = residual(L, c.expansion.flatten(), f.flatten());
      CHECK(R == c.residual);
      CHECK(min_exponent(R) >= g.sigma() * (kappa - 2));
    }
  }
}

TEST_CASE("non-constant boundary trace cancels up to the working degree") {
  const Gamma g(Rational(1, 2));
  const SPoly x1 = mono(g, {1}, 0, 0, 0, 1), t = mono(g, {0}, 0, 0, 1, 1);
  std::vector<std::vector<CoefficientSpec>> a(2, std::vector<CoefficientSpec>(2));
  a[0][0] = SPoly::constant(g, 1, 1);
  a[1][1] = SPoly::constant(g, 1, 1) + scale(x1, Rational(1, 4)) + scale(t, Rational(1, 5));
  const DegenerateOperator L(g, std::move(a), std::vector<CoefficientSpec>(2), CoefficientSpec(), 0.5, 2);
  Expansion f(g, 1);
  f.add(SPoly::constant(g, 1, 1) + x1, 0);
  f.add(t, g.sigma());
  const Rational kappa(9, 2);
  const Construction c = construct_particular_solution(L, f, kappa);
  const SPoly R = residual(L, c.expansion.flatten(), f.flatten());
  for (const auto& [key, coef] : R.terms())
    if (key.tangential_degree() < kappa) CHECK(key.e >= g.sigma() * (kappa - 2));

  std::vector<std::vector<CoefficientSpec>> z(2, std::vector<CoefficientSpec>(2));
  z[0][0] = SPoly::constant(g, 1, 1);
  z[1][1] = x1;
  const DegenerateOperator Z(g, std::move(z), std::vector<CoefficientSpec>(2), CoefficientSpec(), 0.5, 2);
  CHECK_THROWS_AS(particular_solution(Z, f, kappa), DivisionError);
}

TEST_CASE("processing order does not change the result") {
  std::mt19937_64 rng(77);
  for (const char* gs : {"-1", "1/2", "1"}) {
    const Gamma g = Gamma::parse(gs);
    const auto L = variable_operator(g);
    const Rational kappa(9, 2);
    const Expansion f = random_forcing(g, rng, kappa);
    const SPoly ascending = particular_solution(L, f, kappa).flatten();
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      EngineOptions opt;
      opt.order = EngineOptions::Order::random_topological;
      opt.seed = seed;
      CHECK(particular_solution(L, f, kappa, opt).flatten() == ascending);
    }
  }
}

TEST_CASE("interior expansion examples") {
  const Gamma g(Rational(1, 2));
  const auto L = variable_operator(g);
  const SPoly xn = mono(g, {0}, 1, 0, 0, 1);
  const CoefficientFunction U0 = SPoly::constant(g, 1, 1) + mono(g, {1}, 0, 0, 1, 2);
  CHECK(interior_expansion(L, U0, 1, 1).flatten() == U0 * xn);
  CHECK(interior_expansion(L, SPoly(g, 1), 3, 4).empty());

  const auto model = DegenerateOperator::model(g);
  for (int M = 1; M <= 3; ++M)
    for (int N = 1; N <= 4; ++N)
      CHECK(interior_expansion(model, SPoly::constant(g, 0, 1), M, N).flatten() == mono(g, {}, 1, 0, 0, 1));

  CHECK_THROWS_AS(interior_expansion(L, U0, 0, 2), std::invalid_argument);
  const Gamma one(Rational(1));
  CHECK_THROWS_AS(interior_expansion(DegenerateOperator::model(one), SPoly::constant(one, 0, 1), 2, 2), UnsupportedError);
}

TEST_CASE("interior expansion cancels below M + sigma (N - 2)") {
  std::mt19937_64 rng(13);
  for (const char* gs : {"-1", "0", "1/2"}) {
    const Gamma g = Gamma::parse(gs);
    const auto L = variable_operator(g);
    const CoefficientFunction U0 = random_coefficient(g, 1, rng);
    for (int M = 1; M <= 3; ++M)
      for (int N = 1; N <= 4; ++N) {
        const Construction c = construct_interior_expansion(L, U0, M, N);
        CHECK(min_exponent(residual(L, c.expansion.flatten(), SPoly(g, 1))) >= M + g.sigma() * (N - 2));
      }
  }
}

TEST_CASE("to_s_polynomial examples") {
  const Gamma g(Rational(1, 2));
  Expansion E(g, 0);
  E.add(SPoly::constant(g, 0, 1), 1);
  CHECK(to_s_polynomial(E, 3) == mono(g, {}, 1, 0, 0, 1));
  CHECK(to_s_polynomial(E, 1).empty());

  const auto L = DegenerateOperator::constant(g, {{1, 0}, {0, 1}}, {1, Rational(1, 2)}, Rational(-1, 3), 1, 1);
  const CoefficientFunction U0 = mono(g, {2}, 0, 0, 1, 1);
  const Expansion v = homogeneous_hierarchy(L, U0, 4);
  CHECK(to_s_polynomial(v, Rational(11, 2)) == truncate(v.flatten(), Rational(11, 2)));
}

TEST_CASE("expansion container") {
  const Gamma g(Rational(1, 2));
  Expansion E(g, 0);
  E.add(SPoly::constant(g, 0, 2), Rational(3, 2));
  E.add(SPoly::constant(g, 0, 1), Rational(3, 4));
  E.add(SPoly::constant(g, 0, -2), Rational(3, 2));
  REQUIRE(E.terms().size() == 1);
  CHECK(E.terms()[0].e == Rational(3, 4));
  CHECK(Expansion::from_spoly(E.flatten()) == E);
  CHECK_FALSE(is_coefficient_function(mono(g, {}, 1, 0, 0, 1)));
  CHECK(boundary_trace(DegenerateOperator::model(g)) == SPoly::constant(g, 0, 1));
}
