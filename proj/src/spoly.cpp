#include "schauder/spoly.hpp"

#include <numeric>
#include <sstream>

namespace schauder {

Rational MonomialKey::s_degree(const Gamma& gamma) const {
  return Rational(tangential_degree()) + e / gamma.sigma();
}

int MonomialKey::tangential_degree() const {
  return std::accumulate(beta.begin(), beta.end(), 0) + 2 * l;
}

bool operator==(const MonomialKey& a, const MonomialKey& b) {
  return a.e == b.e && a.logpow == b.logpow && a.l == b.l && a.beta == b.beta;
}

bool operator<(const MonomialKey& a, const MonomialKey& b) {
  if (a.e != b.e) return a.e < b.e;
  if (a.logpow != b.logpow) return a.logpow < b.logpow;
  if (a.l != b.l) return a.l < b.l;
  return a.beta < b.beta;
}

MonomialKey key_product(const MonomialKey& a, const MonomialKey& b) {
  if (a.beta.size() != b.beta.size()) throw IncompatibleError("keys have different dimensions");
  MonomialKey k;
  k.beta.resize(a.beta.size());
  for (std::size_t i = 0; i < a.beta.size(); ++i) k.beta[i] = a.beta[i] + b.beta[i];
  k.e = a.e + b.e;
  k.logpow = a.logpow + b.logpow;
  k.l = a.l + b.l;
  return k;
}

void validate_key(const MonomialKey& key, const Gamma& gamma, std::size_t tangential_dims) {
  if (key.beta.size() != tangential_dims) throw InvalidBasisError("multiindex has the wrong length");
  for (int b : key.beta)
    if (b < 0) throw InvalidBasisError("negative tangential power");
  if (key.l < 0) throw InvalidBasisError("negative time power");
  if (key.logpow < 0) throw InvalidBasisError("negative log power");
  if (key.logpow > 0 && !gamma.is_log_case())
    throw InvalidBasisError("log x_n terms only belong to the basis when gamma = 1");
}

bool admissible_exponent(const Rational& e, int logpow, const Gamma& gamma) {
  if (e < 0 || logpow < 0) return false;
  if (gamma.is_log_case()) {
    Rational twice = 2 * e;
    return is_integer(twice) && Rational(logpow) <= twice;
  }
  if (logpow != 0) return false;
  // e = i sigma + j with i, j >= 0 integers.
  for (Rational rest = e; rest >= 0; rest -= gamma.sigma())
    if (is_integer(rest)) return true;
  return false;
}

PointQ origin_point(std::size_t tangential_dims) {
  PointQ p;
  p.xprime.assign(tangential_dims, Rational(0));
  return p;
}

SPolyF to_float(const SPoly& p) {
  SPolyF out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [key, c] : p.terms()) out.accumulate(key, c.get_d());
  return out;
}

std::string to_display_string(const SPoly& p) {
  if (p.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << to_string(c) << ")";
    for (std::size_t i = 0; i < key.beta.size(); ++i)
      if (key.beta[i] != 0) os << "*x" << (i + 1) << "^" << key.beta[i];
    if (key.e != 0) os << "*xn^(" << to_string(key.e) << ")";
    if (key.logpow != 0) os << "*log(xn)^" << key.logpow;
    if (key.l != 0) os << "*t^" << key.l;
  }
  return os.str();
}

}  // namespace schauder
