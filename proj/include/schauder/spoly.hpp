#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "schauder/errors.hpp"
#include "schauder/gamma.hpp"
#include "schauder/metric.hpp"
#include "schauder/rational.hpp"

namespace schauder {

/// Differentiation direction: a tangential variable x_i (i < n-1), x_n, or t.
struct Direction {
  enum class Kind { tangential, normal, time };
  Kind kind = Kind::normal;
  int index = 0;

  static Direction tangential(int i) { return {Kind::tangential, i}; }
  static Direction normal() { return {Kind::normal, 0}; }
  static Direction time() { return {Kind::time, 0}; }
};

/// x'^beta * x_n^e * (log x_n)^logpow * t^l.
struct MonomialKey {
  std::vector<int> beta;
  Rational e;
  int logpow = 0;
  int l = 0;

  /// |beta| + e / sigma + 2 l.
  Rational s_degree(const Gamma& gamma) const;
  /// |beta| + 2 l, the degree of the (x', t) factor.
  int tangential_degree() const;
};

bool operator==(const MonomialKey& a, const MonomialKey& b);
inline bool operator!=(const MonomialKey& a, const MonomialKey& b) { return !(a == b); }
/// Ordered by (e, logpow, l, beta) so that terms sharing an x_n power are adjacent.
bool operator<(const MonomialKey& a, const MonomialKey& b);

MonomialKey key_product(const MonomialKey& a, const MonomialKey& b);

/// Throws InvalidBasisError for negative powers or a log power outside the gamma = 1 case.
void validate_key(const MonomialKey& key, const Gamma& gamma, std::size_t tangential_dims);

/// True when x_n^e (log x_n)^logpow belongs to the s-polynomial basis for gamma.
bool admissible_exponent(const Rational& e, int logpow, const Gamma& gamma);

/// Degree of an s-polynomial; nullopt stands for minus infinity (the empty polynomial).
using SDegree = std::optional<Rational>;

PointQ origin_point(std::size_t tangential_dims);

template <class C>
class BasicSPoly {
 public:
  using Coeff = C;
  using TermMap = std::map<MonomialKey, C>;

  BasicSPoly(Gamma gamma, std::size_t tangential_dims)
      : gamma_(std::move(gamma)), dims_(tangential_dims), center_(origin_point(tangential_dims)) {}

  BasicSPoly(Gamma gamma, std::size_t tangential_dims, PointQ center)
      : gamma_(std::move(gamma)), dims_(tangential_dims), center_(std::move(center)) {
    if (center_.xprime.size() != dims_) throw IncompatibleError("center has the wrong tangential dimension");
  }

  /// Validates every key and drops zero coefficients.
  static BasicSPoly from_terms(const Gamma& gamma, std::size_t dims, TermMap terms,
                               PointQ center) {
    BasicSPoly p(gamma, dims, std::move(center));
    for (auto& [key, c] : terms) {
      validate_key(key, gamma, dims);
      if (c != C(0)) p.terms_.emplace(key, c);
    }
    return p;
  }
  static BasicSPoly from_terms(const Gamma& gamma, std::size_t dims, TermMap terms) {
    return from_terms(gamma, dims, std::move(terms), origin_point(dims));
  }

  static BasicSPoly monomial(const Gamma& gamma, std::vector<int> beta, Rational e, int logpow,
                             int l, C coeff) {
    const std::size_t dims = beta.size();
    MonomialKey key{std::move(beta), std::move(e), logpow, l};
    key.e.canonicalize();
    validate_key(key, gamma, dims);
    BasicSPoly p(gamma, dims);
    if (coeff != C(0)) p.terms_.emplace(std::move(key), std::move(coeff));
    return p;
  }

  static BasicSPoly constant(const Gamma& gamma, std::size_t dims, C value) {
    return monomial(gamma, std::vector<int>(dims, 0), Rational(0), 0, 0, std::move(value));
  }

  const Gamma& gamma() const noexcept { return gamma_; }
  std::size_t tangential_dims() const noexcept { return dims_; }
  const PointQ& center() const noexcept { return center_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  C coefficient(const MonomialKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? C(0) : it->second;
  }

  SDegree s_degree() const {
    SDegree best;
    for (const auto& [key, c] : terms_) {
      Rational d = key.s_degree(gamma_);
      if (!best || d > *best) best = d;
    }
    return best;
  }

  /// Smallest x_n exponent present; nullopt for the empty polynomial.
  std::optional<Rational> min_exponent() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.begin()->first.e;
  }

  double evaluate(const Point& x) const {
    require_normal_center("evaluation");
    if (x.xprime.size() != dims_) throw IncompatibleError("point has the wrong tangential dimension");
    const Point c = to_double(center_);
    double sum = 0.0;
    const double logx = x.xn > 0 ? std::log(x.xn) : 0.0;
    for (const auto& [key, coeff] : terms_) {
      if (x.xn == 0 && (key.e < 0 || key.logpow > 0))
        throw DomainError("term is singular or logarithmic at x_n = 0");
      double v = to_scalar(coeff);
      for (std::size_t i = 0; i < dims_; ++i) v *= std::pow(x.xprime[i] - c.xprime[i], key.beta[i]);
      if (key.e != 0) v *= std::pow(x.xn, key.e.get_d());
      if (key.logpow > 0) v *= std::pow(logx, key.logpow);
      if (key.l > 0) v *= std::pow(x.t - c.t, key.l);
      sum += v;
    }
    return sum;
  }

  /// Exact value at a rational point. Throws DomainError for log terms or irrational powers.
  Rational evaluate_exact(const PointQ& x) const
    requires std::is_same_v<C, Rational>
  {
    require_normal_center("evaluation");
    if (x.xprime.size() != dims_) throw IncompatibleError("point has the wrong tangential dimension");
    Rational sum(0);
    for (const auto& [key, coeff] : terms_) {
      if (key.logpow > 0) throw DomainError("exact evaluation of a log term");
      auto pw = rational_pow(x.xn, key.e);
      if (!pw) throw DomainError("x_n^" + to_string(key.e) + " is not rational at this point");
      Rational v = coeff * *pw;
      for (std::size_t i = 0; i < dims_; ++i) v *= ipow(x.xprime[i] - center_.xprime[i], key.beta[i]);
      v *= ipow(x.t - center_.t, key.l);
      sum += v;
    }
    return sum;
  }

  /// Adds coeff to the term at key; used by builders. Keeps the no-zero invariant.
  void accumulate(const MonomialKey& key, const C& coeff) {
    if (coeff == C(0)) return;
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == C(0)) terms_.erase(it);
    }
  }

  void require_compatible(const BasicSPoly& other) const {
    if (!(gamma_ == other.gamma_)) throw IncompatibleError("s-polynomials have different gamma");
    if (dims_ != other.dims_) throw IncompatibleError("s-polynomials have different dimensions");
    if (!(center_ == other.center_)) throw IncompatibleError("s-polynomials have different centers");
  }

  void require_normal_center(const char* what) const {
    if (center_.xn != 0)
      throw UnsupportedError(std::string(what) + " with a center off the boundary x_n = 0 is not supported");
  }

  friend bool operator==(const BasicSPoly& a, const BasicSPoly& b) {
    return a.gamma_ == b.gamma_ && a.dims_ == b.dims_ && a.center_ == b.center_ && a.terms_ == b.terms_;
  }

 private:
  static double to_scalar(const C& c) {
    if constexpr (std::is_same_v<C, Rational>) return c.get_d();
    else return static_cast<double>(c);
  }

  Gamma gamma_;
  std::size_t dims_;
  PointQ center_;
  TermMap terms_;
};

using SPoly = BasicSPoly<Rational>;
using SPolyF = BasicSPoly<double>;

template <class C>
BasicSPoly<C> operator+(const BasicSPoly<C>& p, const BasicSPoly<C>& q) {
  p.require_compatible(q);
  BasicSPoly<C> out = p;
  for (const auto& [key, c] : q.terms()) out.accumulate(key, c);
  return out;
}

template <class C>
BasicSPoly<C> scale(const BasicSPoly<C>& p, const C& factor) {
  BasicSPoly<C> out(p.gamma(), p.tangential_dims(), p.center());
  if (factor == C(0)) return out;
  for (const auto& [key, c] : p.terms()) out.accumulate(key, C(c * factor));
  return out;
}

template <class C>
BasicSPoly<C> operator-(const BasicSPoly<C>& p) {
  return scale(p, C(-1));
}

template <class C>
BasicSPoly<C> operator-(const BasicSPoly<C>& p, const BasicSPoly<C>& q) {
  p.require_compatible(q);
  BasicSPoly<C> out = p;
  for (const auto& [key, c] : q.terms()) out.accumulate(key, C(-c));
  return out;
}

template <class C>
BasicSPoly<C> operator*(const BasicSPoly<C>& p, const BasicSPoly<C>& q) {
  p.require_compatible(q);
  BasicSPoly<C> out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [ka, ca] : p.terms())
    for (const auto& [kb, cb] : q.terms()) out.accumulate(key_product(ka, kb), C(ca * cb));
  return out;
}

template <class C>
BasicSPoly<C> differentiate(const BasicSPoly<C>& p, Direction dir) {
  p.require_normal_center("differentiation");
  BasicSPoly<C> out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [key, c] : p.terms()) {
    switch (dir.kind) {
      case Direction::Kind::tangential: {
        if (dir.index < 0 || static_cast<std::size_t>(dir.index) >= p.tangential_dims())
          throw std::out_of_range("tangential direction out of range");
        const int b = key.beta[static_cast<std::size_t>(dir.index)];
        if (b == 0) break;
        MonomialKey k = key;
        --k.beta[static_cast<std::size_t>(dir.index)];
        out.accumulate(k, C(c * C(b)));
        break;
      }
      case Direction::Kind::time: {
        if (key.l == 0) break;
        MonomialKey k = key;
        --k.l;
        out.accumulate(k, C(c * C(key.l)));
        break;
      }
      case Direction::Kind::normal: {
        MonomialKey k = key;
        k.e -= 1;
        if (key.e != 0) {
          if constexpr (std::is_same_v<C, Rational>) out.accumulate(k, C(c * key.e));
          else out.accumulate(k, c * key.e.get_d());
        }
        if (key.logpow > 0) {
          --k.logpow;
          out.accumulate(k, C(c * C(key.logpow)));
        }
        break;
      }
    }
  }
  return out;
}

/// Terms with s-degree < kappa, e >= 0 and an exponent from the s-polynomial basis.
template <class C>
BasicSPoly<C> truncate(const BasicSPoly<C>& p, const Rational& kappa) {
  BasicSPoly<C> out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [key, c] : p.terms())
    if (key.e >= 0 && key.s_degree(p.gamma()) < kappa && admissible_exponent(key.e, key.logpow, p.gamma()))
      out.accumulate(key, c);
  return out;
}

SPolyF to_float(const SPoly& p);

/// Sub-polynomial of terms with exponent exactly e.
template <class C>
BasicSPoly<C> exponent_slice(const BasicSPoly<C>& p, const Rational& e) {
  BasicSPoly<C> out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [key, c] : p.terms())
    if (key.e == e) out.accumulate(key, c);
  return out;
}

std::string to_display_string(const SPoly& p);

}  // namespace schauder
