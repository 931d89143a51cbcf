#include "schauder/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "schauder/errors.hpp"

namespace schauder {

namespace {

void require_same_dims(std::size_t a, std::size_t b) {
  if (a != b) throw IncompatibleError("points have different tangential dimensions");
}

Rational exact_sigma_power(const Rational& xn, const Gamma& gamma) {
  auto v = rational_pow(xn, gamma.sigma());
  if (!v) throw DomainError("x_n^sigma is irrational for x_n = " + to_string(xn));
  return *v;
}

}  // namespace

Point to_double(const PointQ& p) {
  Point out;
  out.xprime.reserve(p.xprime.size());
  for (const auto& v : p.xprime) out.xprime.push_back(v.get_d());
  out.xn = p.xn.get_d();
  out.t = p.t.get_d();
  return out;
}

double intrinsic_distance(const Point& x, const Point& y, const Gamma& gamma) {
  require_same_dims(x.xprime.size(), y.xprime.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.xprime.size(); ++i) s = std::max(s, std::abs(x.xprime[i] - y.xprime[i]));
  const double sg = gamma.sigma_d();
  s = std::max(s, std::abs(std::pow(x.xn, sg) - std::pow(y.xn, sg)));
  return std::max(s, std::sqrt(std::abs(x.t - y.t)));
}

double parabolic_distance(const Point& x, const Point& y) {
  require_same_dims(x.xprime.size(), y.xprime.size());
  double d = std::abs(x.xn - y.xn);
  for (std::size_t i = 0; i < x.xprime.size(); ++i) d = std::max(d, std::abs(x.xprime[i] - y.xprime[i]));
  return std::max(d, std::sqrt(std::abs(x.t - y.t)));
}

Point intrinsic_scale(const Point& x, double r, const Gamma& gamma) {
  if (!(r > 0)) throw std::invalid_argument("scaling factor must be positive");
  Point out = x;
  for (auto& v : out.xprime) v *= r;
  out.xn = std::pow(r, 1.0 / gamma.sigma_d()) * x.xn;
  out.t = r * r * x.t;
  return out;
}

Rational intrinsic_distance_squared(const PointQ& x, const PointQ& y, const Gamma& gamma) {
  require_same_dims(x.xprime.size(), y.xprime.size());
  Rational best(0);
  for (std::size_t i = 0; i < x.xprime.size(); ++i) {
    Rational d = x.xprime[i] - y.xprime[i];
    best = std::max(best, Rational(d * d));
  }
  Rational dn = exact_sigma_power(x.xn, gamma) - exact_sigma_power(y.xn, gamma);
  best = std::max(best, Rational(dn * dn));
  return std::max(best, Rational(abs(x.t - y.t)));
}

PointQ intrinsic_scale(const PointQ& x, const Rational& r, const Gamma& gamma) {
  if (r <= 0) throw std::invalid_argument("scaling factor must be positive");
  auto normal = rational_pow(r, Rational(1) / gamma.sigma());
  if (!normal) throw DomainError("r^(1/sigma) is irrational for r = " + to_string(r));
  PointQ out = x;
  for (auto& v : out.xprime) v *= r;
  out.xn = *normal * x.xn;
  out.t = r * r * x.t;
  return out;
}

bool in_intrinsic_cube(const Point& x, const IntrinsicCube& cube) {
  const Point& y = cube.center;
  require_same_dims(x.xprime.size(), y.xprime.size());
  if (x.xn < 0) return false;
  for (std::size_t i = 0; i < x.xprime.size(); ++i)
    if (!(std::abs(x.xprime[i] - y.xprime[i]) < cube.r)) return false;
  const double sg = cube.gamma.sigma_d();
  if (!(std::abs(std::pow(x.xn, sg) - std::pow(y.xn, sg)) < cube.r)) return false;
  return x.t > y.t - cube.r * cube.r && x.t <= y.t;
}

}  // namespace schauder
