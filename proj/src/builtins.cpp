#include "schauder/builtins.hpp"

#include <algorithm>
#include <cmath>

namespace schauder {

namespace {

SPoly term(const Gamma& g, const Rational& e, int logpow, int l, const Rational& c) {
  return SPoly::monomial(g, {}, e, logpow, l, c);
}

}  // namespace

SPoly model_three_term(const Gamma& gamma) {
  const Rational& g = gamma.value();
  SPoly p = term(gamma, 1, 0, 2, Rational(1, 2));
  if (gamma.is_log_case()) {
    p = p + term(gamma, 1, 1, 0, -1);
    p = p + term(gamma, 2, 0, 1, Rational(1, 2));
    return p;
  }
  p = p + term(gamma, 2 - g, 0, 0, Rational(-1) / ((2 - g) * (1 - g)));
  p = p + term(gamma, 3 - g, 0, 1, Rational(1) / ((3 - g) * (2 - g)));
  return p;
}

SPoly model_oracle(const Gamma& gamma) {
  const Rational& g = gamma.value();
  if (gamma.is_log_case()) return model_three_term(gamma) + term(gamma, 3, 0, 0, Rational(1, 12));
  return model_three_term(gamma) + term(gamma, 5 - 2 * g, 0, 0, Rational(1) / ((5 - 2 * g) * (4 - 2 * g) * (3 - g) * (2 - g)));
}

Field model_oracle_field(const Gamma& gamma) {
  const double g = gamma.value_d();
  if (gamma.is_log_case()) {
    return [](const Point& X) {
      const double x = X.xn, t = X.t;
      const double xlog = x > 0 ? x * std::log(x) : 0.0;
      return t * t * x / 2 - xlog + t * x * x / 2 + x * x * x / 12;
    };
  }
  const double c2 = 1 / ((2 - g) * (1 - g));
  const double c3 = 1 / ((3 - g) * (2 - g));
  const double c5 = 1 / ((5 - 2 * g) * (4 - 2 * g) * (3 - g) * (2 - g));
  return [=](const Point& X) {
    const double x = X.xn, t = X.t;
    if (x == 0) return 0.0;
    return t * t * x / 2 - c2 * std::pow(x, 2 - g) + t * c3 * std::pow(x, 3 - g) + c5 * std::pow(x, 5 - 2 * g);
  };
}

DegenerateOperator cev_operator(const Gamma& gamma, const Rational& vol, const Rational& rate) {
  const Rational diffusion = vol * vol / 2;
  std::vector<std::vector<CoefficientSpec>> a(1, std::vector<CoefficientSpec>(1));
  a[0][0] = SPoly::constant(gamma, 0, diffusion);
  std::vector<CoefficientSpec> b(1);
  b[0] = SPoly::monomial(gamma, {}, gamma.sigma(), 0, 0, rate);
  CoefficientSpec c = SPoly::constant(gamma, 0, -rate);
  const double Lambda = std::max(diffusion.get_d(), 2 * std::abs(rate.get_d()));
  return DegenerateOperator(gamma, std::move(a), std::move(b), std::move(c), diffusion.get_d(), Lambda);
}

std::vector<BuiltinEntry> list_builtins() {
  return {
      {"model_1d", "problem", "u_t = x^gamma u_xx + 1 with its closed-form solution as data"},
      {"homogeneous", "problem", "u_t = x^gamma u_xx + 1 with zero initial and boundary data"},
      {"nonpositive", "problem", "u_t = x^gamma u_xx - 1 with nonpositive data"},
      {"zero", "problem", "all data zero"},
      {"cev", "problem", "constant elasticity of variance pricing operator (vol^2/2) x^gamma D_xx + r x D_x - r"},
      {"cev_call", "problem", "call payoff max(x - 1/2, 0) under the CEV operator"},
      {"lip_phi", "barrier", "boundary Lipschitz barrier x^{2-gamma-delta} - 2x and its companion cases"},
      {"existence_w", "barrier", "local barrier w near a boundary point"},
      {"holder_power", "barrier", "boundary Holder barrier x^{sigma alpha}"},
  };
}

IBVP builtin_problem(const std::string& name, const Gamma& gamma) {
  const Field zero = [](const Point&) { return 0.0; };
  const DegenerateOperator model = DegenerateOperator::model(gamma);
  if (name == "model_1d") {
    const Field u = model_oracle_field(gamma);
    return IBVP{model, [](const Point&) { return 1.0; }, u, u};
  }
  if (name == "homogeneous") return IBVP{model, [](const Point&) { return 1.0; }, zero, zero};
  if (name == "nonpositive")
    return IBVP{model, [](const Point&) { return -1.0; }, [](const Point& X) { return -X.xn * (1 - X.xn); }, zero};
  if (name == "zero") return IBVP{model, zero, zero, zero};
  if (name == "cev_call") {
    const Rational rate(1, 20);
    const double r = rate.get_d();
    return IBVP{cev_operator(gamma, Rational(2, 5), rate), zero,
                [](const Point& X) { return std::max(X.xn - 0.5, 0.0); },
                [r](const Point& X) { return X.xn == 0 ? 0.0 : X.xn - 0.5 * std::exp(-r * X.t); }};
  }
  throw std::invalid_argument("unknown built-in problem '" + name + "'");
}

bool builtin_has_oracle(const std::string& name) { return name == "model_1d" || name == "zero"; }

Field builtin_oracle(const std::string& name, const Gamma& gamma) {
  if (name == "model_1d") return model_oracle_field(gamma);
  if (name == "zero") return [](const Point&) { return 0.0; };
  throw std::invalid_argument("built-in problem '" + name + "' has no closed-form solution");
}

}  // namespace schauder
