#include "schauder/barrier.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "schauder/errors.hpp"

namespace schauder {

std::string to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::lip_phi: return "lip_phi";
    case BarrierKind::existence_w: return "existence_w";
    case BarrierKind::holder_power: return "holder_power";
  }
  return "unknown";
}

BarrierKind parse_barrier_kind(const std::string& name) {
  if (name == "lip_phi") return BarrierKind::lip_phi;
  if (name == "existence_w") return BarrierKind::existence_w;
  if (name == "holder_power") return BarrierKind::holder_power;
  throw std::invalid_argument("unknown barrier kind '" + name + "'");
}

namespace {

enum class LipCase { below_zero, unit_interval, log };

LipCase lip_case(const BarrierParams& p) {
  const Rational& g = p.gamma.value();
  const Rational& d = p.delta;
  const Rational bound = std::min<Rational>(Rational(1) - g / 2, Rational(1) - g);
  if (d < 0 || d > bound)
    throw DomainError("lip_phi needs 0 <= delta <= min(1 - gamma/2, 1 - gamma), got delta = " + to_string(d));
  const Rational s = g + d;
  if (s < 0) return LipCase::below_zero;
  if (s < 1) return LipCase::unit_interval;
  return LipCase::log;
}

void require_unit(double xn) {
  if (!(xn >= 0 && xn <= 1)) throw DomainError("barrier evaluated outside x_n in [0, 1]");
}

double safe_pow(double x, double q) { return x == 0 ? (q > 0 ? 0.0 : (q == 0 ? 1.0 : INFINITY)) : std::pow(x, q); }

double holder_exponent(const BarrierParams& p) {
  const Rational& a = p.alpha;
  const Rational& s = p.gamma.sigma();
  if (a <= 0 || a >= 1 || a * s >= 1)
    throw DomainError("holder_power needs 0 < alpha < min(1, 1/sigma), got alpha = " + to_string(a));
  return Rational(s * a).get_d();
}

}  // namespace

double barrier(BarrierKind kind, const BarrierParams& p, double x) {
  require_unit(x);
  const double g = p.gamma.value_d();
  switch (kind) {
    case BarrierKind::lip_phi: {
      const double d = p.delta.get_d();
      switch (lip_case(p)) {
        case LipCase::below_zero: return safe_pow(x, 2 - g - d) + safe_pow(x, 2 - g / 2) - 3 * x;
        case LipCase::unit_interval: return safe_pow(x, 2 - g - d) - 2 * x;
        case LipCase::log: return x == 0 ? 0.0 : x * std::log(x) - x;
      }
      break;
    }
    case BarrierKind::existence_w: {
      if (p.r <= 0) throw DomainError("existence_w needs r > 0");
      const double s = x / p.r.get_d();
      if (p.gamma.value() < 0) return 2 * s - safe_pow(s, 2 - g / 2) - safe_pow(s, 2 - g);
      if (p.gamma.value() < 1) return s - safe_pow(s, 2 - g);
      return x == 0 ? 0.0 : -s * std::log(x);
    }
    case BarrierKind::holder_power: return safe_pow(x, holder_exponent(p));
  }
  return 0.0;
}

double barrier_model_image(BarrierKind kind, const BarrierParams& p, double x) {
  require_unit(x);
  if (x == 0) throw DomainError("barrier image is evaluated for x_n > 0 only");
  const double g = p.gamma.value_d();
  const double wg = std::pow(x, g);
  // Second derivative of c x^q is c q (q - 1) x^{q-2}.
  auto dd = [x](double q) { return q * (q - 1) * std::pow(x, q - 2); };
  double second = 0.0;
  switch (kind) {
    case BarrierKind::lip_phi: {
      const double d = p.delta.get_d();
      switch (lip_case(p)) {
        case LipCase::below_zero: second = dd(2 - g - d) + dd(2 - g / 2); break;
        case LipCase::unit_interval: second = dd(2 - g - d); break;
        case LipCase::log: second = 1 / x; break;
      }
      break;
    }
    case BarrierKind::existence_w: {
      if (p.r <= 0) throw DomainError("existence_w needs r > 0");
      const double r = p.r.get_d();
      if (p.gamma.value() < 0)
        second = -(dd(2 - g / 2) / std::pow(r, 2 - g / 2) + dd(2 - g) / std::pow(r, 2 - g));
      else if (p.gamma.value() < 1)
        second = -dd(2 - g) / std::pow(r, 2 - g);
      else
        second = -1 / (r * x);
      break;
    }
    case BarrierKind::holder_power: second = dd(holder_exponent(p)); break;
  }
  return -wg * second;
}

BarrierCheck check_barrier_sign(BarrierKind kind, const BarrierParams& p, int samples, std::uint64_t seed) {
  BarrierCheck rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double eta = 1.0;
  if (kind == BarrierKind::lip_phi) {
    if (lip_case(p) != LipCase::log) {
      const double s = Rational(p.gamma.value() + p.delta).get_d();
      eta = (2 - s) * (1 - s);
    }
    rep.expected = "image <= -eta x_n^{-delta}";
  } else {
    rep.expected = "image > 0";
  }
  for (int i = 0; i < samples; ++i) {
    // Half the points log-uniform towards the boundary, half uniform.
    const double x = i % 2 == 0 ? std::pow(2.0, -20.0 * unit(rng)) : 1e-9 + (1 - 2e-9) * unit(rng);
    const double img = barrier_model_image(kind, p, x);
    double margin;
    if (kind == BarrierKind::lip_phi) {
      const double target = -eta * std::pow(x, -p.delta.get_d());
      margin = (target - img) / std::max(1.0, std::abs(target));
      margin += 1e-12;
    } else {
      margin = img;
    }
    ++rep.samples;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_xn = x;
    }
    if (kind == BarrierKind::lip_phi ? margin < 0 : !(margin > 0)) rep.ok = false;
  }
  return rep;
}

}  // namespace schauder
