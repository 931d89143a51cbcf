#include <cmath>

#include "doctest.h"
#include "schauder/builtins.hpp"
#include "schauder/verify.hpp"

using namespace schauder;

namespace {

SPoly mono(const Gamma& g, Rational e, int l, Rational c) { return SPoly::monomial(g, {}, std::move(e), 0, l, std::move(c)); }

std::vector<DeviationRow> synthetic_rows(double exponent, double C, int first, int last) {
  std::vector<DeviationRow> rows;
  for (int k = first; k <= last; ++k) {
    const double r = std::ldexp(1.0, -k);
    rows.push_back({r, C * std::pow(r, exponent), Point{}});
  }
  return rows;
}

}  // namespace

TEST_CASE("u = p gives zero deviation and an exact fit") {
  const Gamma g(Rational(1, 2));
  const auto u = as_evaluable(model_oracle(g));
  const auto rows = sup_deviation(u, u, Point{{}, 0, 0}, dyadic_radii(), g);
  for (const auto& row : rows) CHECK(row.sup == 0.0);
  const FitReport fit = fit_exponent(rows);
  CHECK(fit.exact);
  CHECK_FALSE(fit.kappa_hat.has_value());
}

TEST_CASE("fit_exponent on synthetic data") {
  const FitReport fit = fit_exponent(synthetic_rows(3.0, 0.7, 1, 5));
  REQUIRE(fit.kappa_hat.has_value());
  CHECK(std::abs(*fit.kappa_hat - 3.0) < 1e-9);
  CHECK(fit.C_hat == doctest::Approx(0.7));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.used_rows == 5);
  CHECK_THROWS_AS(fit_exponent(synthetic_rows(2.0, 1.0, 3, 3)), InsufficientDataError);
  auto rows = synthetic_rows(2.0, 1.0, 2, 4);
  rows[0].sup = 0;
  rows[1].sup = 0;
  CHECK_THROWS_AS(fit_exponent(rows), InsufficientDataError);
}

TEST_CASE("oracle deviation scales like r^{5 - 2 gamma} in the intrinsic cube") {
  const Gamma g(Rational(1, 2));
  const auto u = as_evaluable(model_oracle(g));
  const auto p = as_evaluable(model_three_term(g));
  const auto rows = sup_deviation(u, p, Point{{}, 0, 0}, dyadic_radii(), g);
  // On the intrinsic cube x_n < r^{1/sigma}, so x_n^4 / 45 peaks at r^{16/3} / 45.
  for (const auto& row : rows) CHECK(row.sup == doctest::Approx(std::pow(row.r, 16.0 / 3.0) / 45.0).epsilon(1e-9));
  const FitReport fit = fit_exponent(rows);
  CHECK(*fit.kappa_hat == doctest::Approx(16.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("oracle deviation scales like r^4 in the standard cube") {
  const Gamma g(Rational(1, 2));
  const auto u = as_evaluable(model_oracle(g));
  const auto p = as_evaluable(model_three_term(g));
  DeviationOptions opt;
  opt.cube = CubeKind::standard;
  const FitReport fit = fit_exponent(sup_deviation(u, p, Point{{}, 0, 0}, dyadic_radii(), g, opt));
  CHECK(std::abs(*fit.kappa_hat - 4.0) < 0.15);
}

TEST_CASE("deviation from the leading term alone is quadratic in the intrinsic gauge") {
  const Gamma g(Rational(1, 2));
  const auto u = as_evaluable(model_oracle(g));
  const auto p = as_evaluable(mono(g, 1, 2, Rational(1, 2)));
  const FitReport fit = fit_exponent(sup_deviation(u, p, Point{{}, 0, 0}, dyadic_radii(3, 7), g));
  CHECK(std::abs(*fit.kappa_hat - 2.0) < 0.05);
}

TEST_CASE("sup deviation rows are monotone and deterministic") {
  const Gamma g(Rational(1, 3));
  const Evaluable u = [](const Point& X) { return std::sin(7 * X.xn) + X.t * X.t + std::cos(X.xprime[0]); };
  const Evaluable p = [](const Point& X) { return std::cos(X.xprime[0]); };
  DeviationOptions opt;
  opt.samples = 512;
  const auto radii = dyadic_radii(1, 6);
  const auto a = sup_deviation(u, p, Point{{0.1}, 0.05, 0.2}, radii, g, opt);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].sup <= a[i - 1].sup);
  opt.threads = 4;
  const auto b = sup_deviation(u, p, Point{{0.1}, 0.05, 0.2}, radii, g, opt);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].sup == b[i].sup);
  CHECK_THROWS_AS(sup_deviation(u, p, Point{{0.0}, 0, 0}, {0.25, 0.5}, g, opt), std::invalid_argument);
}

TEST_CASE("cube samples respect the cube and the half-space") {
  const Gamma g(Rational(1, 2));
  const Point c{{0.2}, 0.01, 0.3};
  for (CubeKind kind : {CubeKind::intrinsic, CubeKind::standard}) {
    for (const Point& X : sample_cube(c, 0.125, g, kind, 256, 9)) {
      CHECK(X.xn >= 0);
      CHECK(X.t <= c.t);
      CHECK(X.t >= c.t - 0.125 * 0.125);
      CHECK(std::abs(X.xprime[0] - c.xprime[0]) <= 0.125);
      const double gap = kind == CubeKind::intrinsic ? std::abs(std::pow(X.xn, 0.75) - std::pow(c.xn, 0.75)) : std::abs(X.xn - c.xn);
      CHECK(gap <= 0.125 + 1e-12);
    }
  }
}

TEST_CASE("scaling covariance of the deviation") {
  // u(rX) = r^{16/3} u(X) for u = x_n^4 and gamma = 1/2, so rows scale exactly under the intrinsic dilation.
  const Gamma g(Rational(1, 2));
  const auto u = as_evaluable(mono(g, 4, 0, 1));
  const Evaluable zero = [](const Point&) { return 0.0; };
  const auto rows = sup_deviation(u, zero, Point{{}, 0, 0}, {0.5, 0.25, 0.125}, g);
  CHECK(rows[1].sup == doctest::Approx(rows[0].sup * std::pow(0.5, 16.0 / 3.0)).epsilon(1e-12));
  CHECK(rows[2].sup == doctest::Approx(rows[1].sup * std::pow(0.5, 16.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("nodal deviation on a discrete solution") {
  const Gamma g(Rational(1, 2));
  Grid G;
  G.gamma = g;
  G.K = 64;
  G.steps = 32;
  const auto sol = solve_ibvp(builtin_problem("zero", g), G);
  const Evaluable zero = [](const Point&) { return 0.0; };
  for (const auto& row : sup_deviation_nodes(sol, zero, Point{{}, 0, 0.5}, dyadic_radii(), g)) CHECK(row.sup == 0.0);
  const auto u = as_evaluable(sol);
  CHECK(u(Point{{}, 0.3, 0.2}) == 0.0);
}

TEST_CASE("boundary growth ratio examples") {
  const std::vector<double> levels{0.5, 0.25, 0.125, 0.0625, 1.0 / 64};
  const Gamma half(Rational(1, 2)), one(Rational(1));
  const Evaluable lin = [](const Point& X) { return X.xn; };
  for (const auto& row : boundary_growth_ratio(lin, half, levels)) CHECK(row.ratio == doctest::Approx(1.0));
  CHECK(growth_bounded(boundary_growth_ratio(lin, half, levels)));

  const Evaluable xlog = [](const Point& X) { return X.xn * std::log(X.xn); };
  for (const auto& row : boundary_growth_ratio(xlog, one, levels)) CHECK(row.ratio == doctest::Approx(1.0));

  const Evaluable root = [](const Point& X) { return std::sqrt(X.xn); };
  const auto rows = boundary_growth_ratio(root, half, levels);
  CHECK(rows.back().ratio == doctest::Approx(std::sqrt(64.0)));
  CHECK_FALSE(growth_bounded(rows));
  CHECK_THROWS_AS(boundary_growth_ratio(lin, half, {0.75}), std::invalid_argument);
}

TEST_CASE("Hoelder estimates") {
  const Gamma g(Rational(1, 2));
  const Evaluable c = [](const Point&) { return 3.0; };
  CHECK(holder_norm_estimate(c, 0.5, g, 2000) == 0.0);
  const Evaluable ys = [](const Point& X) { return std::pow(X.xn, 0.75); };
  for (double alpha : {0.25, 0.5, 0.9}) CHECK(holder_norm_estimate(ys, alpha, g, 4000) <= 1.0 + 1e-6);
  const double oracle = holder_norm_estimate(as_evaluable(model_oracle(g)), 0.5, g, 4000);
  CHECK(std::isfinite(oracle));
  CHECK(oracle < 10.0);
  CHECK_THROWS_AS(holder_norm_estimate(c, 1.0, g, 10), std::invalid_argument);
}
