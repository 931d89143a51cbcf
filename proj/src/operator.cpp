#include "schauder/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace schauder {

bool CoefficientSpec::is_zero() const {
  if (std::holds_alternative<std::monostate>(value_)) return true;
  if (const auto* p = spoly()) return p->empty();
  return false;
}

double CoefficientSpec::operator()(const Point& x) const {
  if (std::holds_alternative<std::monostate>(value_)) return 0.0;
  if (const auto* p = spoly()) return p->evaluate(x);
  return std::get<Field>(value_)(x);
}

DegenerateOperator::DegenerateOperator(Gamma gamma, std::vector<std::vector<CoefficientSpec>> a,
                                       std::vector<CoefficientSpec> b, CoefficientSpec c, double lambda,
                                       double Lambda)
    : gamma_(std::move(gamma)), n_(a.size()), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
      lambda_(lambda), Lambda_(Lambda) {
  if (n_ == 0) throw InvalidOperatorError("operator needs at least one space dimension");
  for (const auto& row : a_)
    if (row.size() != n_) throw InvalidOperatorError("second-order coefficient array is not square");
  if (b_.size() != n_) throw InvalidOperatorError("first-order coefficient vector has the wrong length");
  if (!(lambda_ > 0) || !(Lambda_ >= lambda_)) throw InvalidOperatorError("need 0 < lambda <= Lambda");

  auto check_poly = [&](const CoefficientSpec& s) {
    if (const auto* p = s.spoly()) {
      if (!(p->gamma() == gamma_)) throw IncompatibleError("coefficient has a different gamma");
      if (p->tangential_dims() != n_ - 1) throw IncompatibleError("coefficient has the wrong dimension");
    }
  };
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) check_poly(a_[i][j]);
    check_poly(b_[i]);
  }
  check_poly(c_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const auto *p = a_[i][j].spoly(), *q = a_[j][i].spoly();
      const bool both_symbolic = a_[i][j].is_symbolic() && a_[j][i].is_symbolic();
      if (both_symbolic && (a_[i][j].is_zero() != a_[j][i].is_zero() || (p && q && !(*p == *q))))
        throw InvalidOperatorError("second-order coefficients are not symmetric");
    }
}

DegenerateOperator DegenerateOperator::model(const Gamma& gamma) {
  std::vector<std::vector<CoefficientSpec>> a(1, std::vector<CoefficientSpec>(1));
  a[0][0] = SPoly::constant(gamma, 0, Rational(1));
  return DegenerateOperator(gamma, std::move(a), std::vector<CoefficientSpec>(1), CoefficientSpec(), 1.0, 1.0);
}

DegenerateOperator DegenerateOperator::constant(const Gamma& gamma, const std::vector<std::vector<Rational>>& A,
                                                const std::vector<Rational>& B, const Rational& C, double lambda,
                                                double Lambda) {
  const std::size_t n = A.size();
  auto spec = [&](const Rational& v) -> CoefficientSpec {
    if (v == 0) return {};
    return SPoly::constant(gamma, n - 1, v);
  };
  std::vector<std::vector<CoefficientSpec>> a(n, std::vector<CoefficientSpec>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (A[i].size() != n) throw InvalidOperatorError("constant coefficient matrix is not square");
    for (std::size_t j = 0; j < n; ++j) a[i][j] = spec(A[i][j]);
  }
  if (B.size() != n) throw InvalidOperatorError("constant drift has the wrong length");
  std::vector<CoefficientSpec> b;
  for (const auto& v : B) b.push_back(spec(v));
  return DegenerateOperator(gamma, std::move(a), std::move(b), spec(C), lambda, Lambda);
}

bool DegenerateOperator::is_symbolic() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j)
      if (!a_[i][j].is_symbolic()) return false;
    if (!b_[i].is_symbolic()) return false;
  }
  return c_.is_symbolic();
}

bool DegenerateOperator::has_constant_coefficients() const {
  auto constant = [](const CoefficientSpec& s) {
    if (s.is_zero()) return true;
    const auto* p = s.spoly();
    if (!p || p->size() != 1) return false;
    const auto& key = p->terms().begin()->first;
    return key.e == 0 && key.logpow == 0 && key.tangential_degree() == 0;
  };
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j)
      if (!constant(a_[i][j])) return false;
    if (!constant(b_[i])) return false;
  }
  return constant(c_);
}

WeightedDerivativeTable::Image WeightedDerivativeTable::normal(const MonomialKey& key, const Gamma& gamma) {
  Image out;
  MonomialKey k = key;
  k.e = key.e - gamma.sigma();
  if (key.e != 0) out.emplace_back(k, key.e);
  if (key.logpow > 0) {
    --k.logpow;
    out.emplace_back(k, Rational(key.logpow));
  }
  return out;
}

WeightedDerivativeTable::Image WeightedDerivativeTable::normal_normal(const MonomialKey& key, const Gamma& gamma) {
  // x^gamma D_nn [(log x)^m x^e] = x^{e - 2 sigma} [e(e-1) L^m + m(2e-1) L^{m-1} + m(m-1) L^{m-2}]
  Image out;
  const Rational& e = key.e;
  const int m = key.logpow;
  MonomialKey k = key;
  k.e = e - 2 * gamma.sigma();
  Rational f0 = e * (e - 1);
  if (f0 != 0) out.emplace_back(k, f0);
  if (m >= 1) {
    k.logpow = m - 1;
    Rational f1 = Rational(m) * (2 * e - 1);
    if (f1 != 0) out.emplace_back(k, f1);
  }
  if (m >= 2) {
    k.logpow = m - 2;
    out.emplace_back(k, Rational(m * (m - 1)));
  }
  return out;
}

namespace {

template <class Rule>
SPoly map_terms(const SPoly& u, Rule rule) {
  u.require_normal_center("weighted differentiation");
  SPoly out(u.gamma(), u.tangential_dims(), u.center());
  for (const auto& [key, c] : u.terms())
    for (const auto& [k, f] : rule(key, u.gamma())) out.accumulate(k, Rational(c * f));
  return out;
}

void add_product(SPoly& acc, const CoefficientSpec& coef, const SPoly& term, const Rational& factor) {
  if (coef.is_zero() || term.empty()) return;
  const SPoly* p = coef.spoly();
  if (!p) throw UnsupportedError("numeric coefficient in a symbolic operation");
  acc = acc + scale(*p * term, factor);
}

}  // namespace

SPoly weighted_normal(const SPoly& u) { return map_terms(u, WeightedDerivativeTable::normal); }

SPoly weighted_normal_normal(const SPoly& u) { return map_terms(u, WeightedDerivativeTable::normal_normal); }

SPoly weighted_tangential_normal(const SPoly& u, int i) {
  return weighted_normal(differentiate(u, Direction::tangential(i)));
}

SPoly apply(const DegenerateOperator& L, const SPoly& u) {
  if (!L.is_symbolic()) throw UnsupportedError("apply needs symbolic coefficients");
  if (!(u.gamma() == L.gamma()) || u.tangential_dims() != L.tangential_dims())
    throw IncompatibleError("operator and s-polynomial do not match");
  u.require_normal_center("operator application");
  const std::size_t m = L.tangential_dims();
  const std::size_t nn = m;
  SPoly out(u.gamma(), m, u.center());

  std::vector<SPoly> du;
  for (std::size_t i = 0; i < m; ++i) du.push_back(differentiate(u, Direction::tangential(static_cast<int>(i))));

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (L.a(i, j).is_zero()) continue;
      SPoly dij = differentiate(du[i], Direction::tangential(static_cast<int>(j)));
      add_product(out, L.a(i, j), dij, Rational(i == j ? 1 : 2));
    }
    if (!L.a(i, nn).is_zero()) add_product(out, L.a(i, nn), weighted_normal(du[i]), Rational(2));
    add_product(out, L.b(i), du[i], Rational(1));
  }
  add_product(out, L.a(nn, nn), weighted_normal_normal(u), Rational(1));
  if (!L.b(nn).is_zero()) add_product(out, L.b(nn), weighted_normal(u), Rational(1));
  add_product(out, L.c(), u, Rational(1));
  return out;
}

SPoly residual(const DegenerateOperator& L, const SPoly& u, const SPoly& f) {
  return differentiate(u, Direction::time()) - apply(L, u) - f;
}

CoefficientSet eval_coefficients(const DegenerateOperator& L, const Point& x) {
  const std::size_t n = L.n();
  const std::size_t nn = n - 1;
  CoefficientSet s;
  s.n = n;
  s.a.assign(n * n, 0.0);
  s.a_weighted.assign(n * n, 0.0);
  s.a_singular.assign(n * n, false);
  s.b.assign(n, 0.0);
  s.b_weighted.assign(n, 0.0);
  s.b_singular.assign(n, false);

  const double g = L.gamma().value_d();
  const bool singular = x.xn == 0 && g < 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double half = singular ? nan : (g == 0 ? 1.0 : std::pow(x.xn, g / 2));
  const double full = singular ? nan : (g == 0 ? 1.0 : std::pow(x.xn, g));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = L.a(i, j)(x);
      s.a[i * n + j] = v;
      const bool touches_normal = i == nn || j == nn;
      if (!touches_normal) {
        s.a_weighted[i * n + j] = v;
      } else {
        s.a_weighted[i * n + j] = (i == nn && j == nn) ? full * v : half * v;
        s.a_singular[i * n + j] = singular;
      }
    }
    s.b[i] = L.b(i)(x);
    s.b_weighted[i] = i == nn ? half * s.b[i] : s.b[i];
    s.b_singular[i] = i == nn && singular;
  }
  s.c = L.c()(x);
  return s;
}

ValidationReport validate(const DegenerateOperator& L, const SamplingBox& box) {
  ValidationReport rep;
  const std::size_t n = L.n();
  const std::size_t m = n - 1;
  const int g = std::max(box.nodes_per_axis, 2);
  std::mt19937_64 rng(box.seed);
  std::normal_distribution<double> normal;

  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  for (int k = 0; k < box.directions; ++k) {
    std::vector<double> xi(n);
    for (auto& v : xi) v = normal(rng);
    dirs.push_back(xi);
  }

  // Node layout: tangential axes on [-1,1], x_n on (0,1], t on [t_min, t_max].
  std::size_t total = 1;
  for (std::size_t k = 0; k < m + 2; ++k) total *= static_cast<std::size_t>(g);
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = -std::numeric_limits<double>::infinity();
  double max_c = -std::numeric_limits<double>::infinity();
  std::vector<double> sup_b(n, 0.0);
  double sup_c = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    Point x;
    x.xprime.resize(m);
    auto coord = [&]() {
      const double u = static_cast<double>(rest % static_cast<std::size_t>(g)) / (g - 1);
      rest /= static_cast<std::size_t>(g);
      return u;
    };
    for (std::size_t i = 0; i < m; ++i) x.xprime[i] = -1.0 + 2.0 * coord();
    x.xn = std::max(coord(), 1e-9);
    x.t = box.t_min + (box.t_max - box.t_min) * coord();

    const CoefficientSet s = eval_coefficients(L, x);
    for (const auto& xi : dirs) {
      double q = 0.0, norm2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        norm2 += xi[i] * xi[i];
        for (std::size_t j = 0; j < n; ++j) q += s.a_at(i, j) * xi[i] * xi[j];
      }
      min_ratio = std::min(min_ratio, q / norm2);
      max_ratio = std::max(max_ratio, q / norm2);
    }
    for (std::size_t i = 0; i < n; ++i) sup_b[i] = std::max(sup_b[i], std::abs(s.b[i]));
    sup_c = std::max(sup_c, std::abs(s.c));
    max_c = std::max(max_c, s.c);
  }
  rep.min_eigen_ratio = min_ratio;
  rep.max_eigen_ratio = max_ratio;
  rep.max_c = max_c;
  rep.lower_order_bound = sup_c;
  for (double v : sup_b) rep.lower_order_bound += v;

  const double tol = 1e-12;
  auto fail = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  std::ostringstream os;
  if (min_ratio < L.lambda() - tol) {
    os << "ellipticity lower bound violated: " << min_ratio << " < lambda = " << L.lambda();
    fail(os.str());
    os.str("");
  }
  if (max_ratio > L.Lambda() + tol) {
    os << "ellipticity upper bound violated: " << max_ratio << " > Lambda = " << L.Lambda();
    fail(os.str());
    os.str("");
  }
  if (max_c > tol) {
    os << "zeroth-order coefficient is positive somewhere: max c = " << max_c;
    fail(os.str());
    os.str("");
  }
  if (rep.lower_order_bound > L.Lambda() + tol) {
    os << "lower-order bound violated: " << rep.lower_order_bound << " > Lambda = " << L.Lambda();
    fail(os.str());
  }
  return rep;
}

void require_valid(const DegenerateOperator& L, const SamplingBox& box) {
  const auto rep = validate(L, box);
  if (rep.ok) return;
  std::string msg = "invalid operator:";
  for (const auto& v : rep.violations) msg += " " + v + ";";
  throw InvalidOperatorError(msg);
}

}  // namespace schauder
