#include "schauder/expansion.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "schauder/tridiagonal.hpp"

namespace schauder {

bool is_coefficient_function(const SPoly& p) {
  for (const auto& [key, c] : p.terms())
    if (key.e != 0 || key.logpow != 0) return false;
  return true;
}

namespace {

void require_coefficient_function(const SPoly& p, const char* what) {
  if (!is_coefficient_function(p))
    throw std::invalid_argument(std::string(what) + " must be a polynomial in (x', t) only");
  p.require_normal_center(what);
}

/// Lifts a coefficient function to coef * x_n^e (log x_n)^logpow.
SPoly lift(const CoefficientFunction& coef, const Rational& e, int logpow) {
  SPoly out(coef.gamma(), coef.tangential_dims(), coef.center());
  for (const auto& [key, c] : coef.terms()) {
    MonomialKey k = key;
    k.e = e;
    k.logpow = logpow;
    validate_key(k, coef.gamma(), coef.tangential_dims());
    out.accumulate(k, c);
  }
  return out;
}

CoefficientFunction truncate_tangential(const CoefficientFunction& p, const Rational& degree) {
  CoefficientFunction out(p.gamma(), p.tangential_dims(), p.center());
  for (const auto& [key, c] : p.terms())
    if (Rational(key.tangential_degree()) < degree) out.accumulate(key, c);
  return out;
}

}  // namespace

Expansion::Expansion(Gamma gamma, std::size_t tangential_dims) : gamma_(std::move(gamma)), dims_(tangential_dims) {}

Expansion Expansion::from_spoly(const SPoly& p) {
  p.require_normal_center("expansion");
  Expansion out(p.gamma(), p.tangential_dims());
  std::map<std::pair<Rational, int>, CoefficientFunction> groups;
  for (const auto& [key, c] : p.terms()) {
    MonomialKey k = key;
    k.e = 0;
    k.logpow = 0;
    auto it = groups.try_emplace({key.e, key.logpow}, p.gamma(), p.tangential_dims()).first;
    it->second.accumulate(k, c);
  }
  for (auto& [idx, coef] : groups) out.add(coef, idx.first, idx.second);
  return out;
}

void Expansion::add(const CoefficientFunction& coef, const Rational& e, int logpow) {
  if (!(coef.gamma() == gamma_) || coef.tangential_dims() != dims_)
    throw IncompatibleError("expansion coefficient does not match the expansion");
  require_coefficient_function(coef, "expansion coefficient");
  if (logpow < 0 || (logpow > 0 && !gamma_.is_log_case()))
    throw InvalidBasisError("log power outside the gamma = 1 case");
  if (coef.empty()) return;
  auto pos = std::lower_bound(terms_.begin(), terms_.end(), std::make_pair(e, logpow),
                              [](const ExpansionTerm& t, const std::pair<Rational, int>& k) {
                                return t.e != k.first ? t.e < k.first : t.logpow < k.second;
                              });
  if (pos != terms_.end() && pos->e == e && pos->logpow == logpow) {
    pos->coef = pos->coef + coef;
    if (pos->coef.empty()) terms_.erase(pos);
    return;
  }
  terms_.insert(pos, ExpansionTerm{coef, e, logpow});
}

CoefficientFunction Expansion::coefficient(const Rational& e, int logpow) const {
  for (const auto& t : terms_)
    if (t.e == e && t.logpow == logpow) return t.coef;
  return CoefficientFunction(gamma_, dims_);
}

SPoly Expansion::flatten() const {
  SPoly out(gamma_, dims_);
  for (const auto& t : terms_) out = out + lift(t.coef, t.e, t.logpow);
  return out;
}

bool operator==(const Expansion& a, const Expansion& b) {
  if (!(a.gamma_ == b.gamma_) || a.dims_ != b.dims_ || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    const auto &x = a.terms_[i], &y = b.terms_[i];
    if (x.e != y.e || x.logpow != y.logpow || !(x.coef == y.coef)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Constant-coefficient hierarchy

namespace {

Rational constant_value(const CoefficientSpec& s) {
  if (s.is_zero()) return Rational(0);
  const SPoly* p = s.spoly();
  if (!p) throw UnsupportedError("numeric coefficient where a constant was expected");
  return p->terms().begin()->second;
}

}  // namespace

Expansion homogeneous_hierarchy(const DegenerateOperator& L0, const CoefficientFunction& U0, int N) {
  const Gamma& g = L0.gamma();
  if (g.is_log_case()) throw UnsupportedError("the homogeneous hierarchy is only available for gamma < 1");
  if (!L0.is_symbolic() || !L0.has_constant_coefficients())
    throw UnsupportedError("the homogeneous hierarchy needs constant coefficients");
  if (N < 0) throw std::invalid_argument("hierarchy depth must be nonnegative");
  if (!(U0.gamma() == g) || U0.tangential_dims() != L0.tangential_dims())
    throw IncompatibleError("boundary datum does not match the operator");
  require_coefficient_function(U0, "boundary datum");

  const std::size_t m = L0.tangential_dims();
  const std::size_t nn = m;
  const Rational Ann = constant_value(L0.a(nn, nn));
  if (Ann <= 0) throw InvalidOperatorError("A^{nn} must be positive");
  const Rational& sigma = g.sigma();

  auto Dx = [](const SPoly& u, std::size_t i) { return differentiate(u, Direction::tangential(static_cast<int>(i))); };
  // 2 A^{i'n} D_{i'} + B^n
  auto normal_part = [&](const SPoly& u) {
    SPoly out = scale(u, constant_value(L0.b(nn)));
    for (std::size_t i = 0; i < m; ++i) out = out + scale(Dx(u, i), Rational(2 * constant_value(L0.a(i, nn))));
    return out;
  };
  // d_t - A^{i'j'} D_{i'j'} - B^{i'} D_{i'} - C
  auto tangential_part = [&](const SPoly& u) {
    SPoly out = differentiate(u, Direction::time()) - scale(u, constant_value(L0.c()));
    for (std::size_t i = 0; i < m; ++i) {
      const SPoly di = Dx(u, i);
      out = out - scale(di, constant_value(L0.b(i)));
      for (std::size_t j = 0; j < m; ++j) out = out - scale(Dx(di, j), constant_value(L0.a(i, j)));
    }
    return out;
  };

  Expansion v(g, m);
  SPoly prev2(g, m);
  SPoly prev1 = U0;
  v.add(U0, Rational(1));
  for (int l = 1; l <= N; ++l) {
    const Rational sl = sigma * l;
    const Rational denom = sl * (1 + sl) * Ann;
    SPoly numer = scale(normal_part(prev1), Rational(1 + sigma * (l - 1))) - tangential_part(prev2);
    SPoly Ul = scale(numer, Rational(-1 / denom));
    v.add(Ul, Rational(1 + sl));
    prev2 = std::move(prev1);
    prev1 = std::move(Ul);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Degree set and resonance

bool in_degree_set(const Rational& value, const Gamma& gamma) {
  const Rational step = 1 / gamma.sigma();
  for (Rational rest = value; rest >= 0; rest -= step)
    if (is_integer(rest)) return true;
  return false;
}

void require_nonresonant_kappa(const Rational& kappa, const Gamma& gamma) {
  if (kappa <= 2 || is_integer(kappa))
    throw ResonanceError("kappa must be k + 2 + alpha with 0 < alpha < 1, got " + to_string(kappa));
  if (in_degree_set(kappa, gamma))
    throw ResonanceError("kappa = " + to_string(kappa) + " lies in the degree set for gamma = " +
                         to_string(gamma.value()));
}

// ---------------------------------------------------------------------------
// Tridiagonal system

Rational TridiagonalMatrix::at(std::size_t row, std::size_t col) const {
  if (row == col) return diag.at(row);
  if (row == col + 1) return sub.at(col);
  if (col == row + 1) return super.at(row);
  if (row >= diag.size() || col >= diag.size()) throw std::out_of_range("matrix index");
  return Rational(0);
}

Rational TridiagonalMatrix::determinant() const { return tridiagonal_determinant(sub, diag, super); }

TridiagonalMatrix tridiagonal_T(int m) {
  if (m < 1) throw std::invalid_argument("T^m needs m >= 1");
  TridiagonalMatrix T;
  T.m = m;
  for (int l = 0; l <= m; ++l) T.diag.emplace_back((l + 1) * (m + 1));
  for (int l = 0; l < m; ++l) {
    T.sub.push_back(make_rational(m * (m + 2), 4));
    T.super.emplace_back((l + 1) * (l + 2));
  }
  return T;
}

std::vector<Rational> solve_T(int m, const std::vector<Rational>& rhs) {
  const TridiagonalMatrix T = tridiagonal_T(m);
  if (rhs.size() != T.diag.size()) throw std::invalid_argument("right-hand side must have length m + 1");
  auto x = thomas_solve(T.sub, T.diag, T.super, rhs);
  for (auto& v : x) v.canonicalize();
  return x;
}

// ---------------------------------------------------------------------------
// Cancellation engine

CoefficientFunction boundary_trace(const DegenerateOperator& L) {
  const std::size_t nn = L.n() - 1;
  const CoefficientSpec& ann = L.a(nn, nn);
  if (!ann.is_symbolic()) throw UnsupportedError("the boundary trace needs a symbolic a^{nn}");
  CoefficientFunction trace(L.gamma(), L.tangential_dims());
  if (const SPoly* p = ann.spoly()) {
    for (const auto& [key, c] : p->terms()) {
      if (key.e != 0) continue;
      if (key.logpow != 0) throw UnsupportedError("a^{nn} has a log term at x_n^0");
      trace.accumulate(key, c);
    }
  }
  return trace;
}

namespace {

class CancellationEngine {
 public:
  CancellationEngine(const DegenerateOperator& L, Rational threshold, Rational working_degree)
      : L_(L), gamma_(L.gamma()), dims_(L.tangential_dims()), threshold_(std::move(threshold)),
        working_degree_(std::move(working_degree)), trace_(boundary_trace(L)) {
    MonomialKey zero{std::vector<int>(dims_, 0), Rational(0), 0, 0};
    trace0_ = trace_.coefficient(zero);
    if (trace0_ == 0) throw DivisionError("P^{nn}(x', 0, t) has no invertible constant term");
    constant_trace_ = trace_.size() == 1;
    if (!constant_trace_) {
      // 1/P = (1/p0) sum (-(P - p0)/p0)^k, truncated to the working degree.
      CoefficientFunction q = scale(trace_ - CoefficientFunction::constant(gamma_, dims_, trace0_),
                                    Rational(-1 / trace0_));
      CoefficientFunction power = CoefficientFunction::constant(gamma_, dims_, Rational(1));
      inverse_ = power;
      while (true) {
        power = truncate_tangential(power * q, working_degree_);
        if (power.empty()) break;
        inverse_ = inverse_ + power;
      }
      inverse_ = scale(inverse_, Rational(1 / trace0_));
    }
    collect_shifts();
  }

  Construction run(const SPoly& seed, const SPoly& forcing, const EngineOptions& options) {
    SPoly h = seed;
    SPoly R = residual(L_, seed, forcing);
    const std::vector<Rational> nodes = schedule(R, options);
    std::vector<Rational> processed;
    for (const Rational& e : nodes) {
      processed.push_back(e);
      SPoly delta = correction(R, e);
      if (delta.empty()) continue;
      h = h + delta;
      R = R + residual(L_, delta, SPoly(gamma_, dims_));
      for (const auto& [key, c] : R.terms())
        if (key.e == e && is_target(key))
          throw std::logic_error("cancellation left a term at x_n^" + to_string(e));
    }
    for (const auto& [key, c] : R.terms())
      if (is_target(key)) throw std::logic_error("dependency closure missed x_n^" + to_string(key.e));
    return Construction{Expansion::from_spoly(h), R, processed, threshold_};
  }

 private:
  bool is_target(const MonomialKey& key) const {
    return key.e < threshold_ && (constant_trace_ || Rational(key.tangential_degree()) < working_degree_);
  }

  void collect_shifts() {
    const std::size_t nn = dims_;
    std::set<Rational> shifts;
    auto add = [&](const CoefficientSpec& s, const Rational& base) {
      if (s.is_zero()) return;
      const SPoly* p = s.spoly();
      if (!p) throw UnsupportedError("the cancellation engines need symbolic coefficients");
      for (const auto& [key, c] : p->terms()) {
        if (key.e < 0) throw UnsupportedError("operator coefficients must be s-polynomials at O");
        shifts.insert(base + key.e);
      }
    };
    const Rational& sigma = gamma_.sigma();
    add(L_.a(nn, nn), Rational(0));
    for (std::size_t i = 0; i < nn; ++i) {
      add(L_.a(i, nn), sigma);
      for (std::size_t j = i; j < nn; ++j) add(L_.a(i, j), 2 * sigma);
      add(L_.b(i), 2 * sigma);
    }
    add(L_.b(nn), sigma);
    add(L_.c(), 2 * sigma);
    shifts.insert(2 * sigma);
    shifts.erase(Rational(0));
    shifts_.assign(shifts.begin(), shifts.end());
  }

  std::vector<Rational> schedule(const SPoly& R, const EngineOptions& options) const {
    std::set<Rational> nodes;
    std::vector<Rational> frontier;
    for (const auto& [key, c] : R.terms())
      if (is_target(key) && nodes.insert(key.e).second) frontier.push_back(key.e);
    while (!frontier.empty()) {
      Rational e = frontier.back();
      frontier.pop_back();
      for (const auto& s : shifts_) {
        Rational next = e + s;
        if (next < threshold_ && nodes.insert(next).second) frontier.push_back(next);
      }
    }
    std::vector<Rational> sorted(nodes.begin(), nodes.end());
    if (options.order == EngineOptions::Order::ascending) return sorted;

    // Kahn's algorithm with a seeded random pick among ready nodes.
    std::map<Rational, int> indegree;
    for (const auto& v : sorted) indegree[v] = 0;
    for (const auto& u : sorted)
      for (const auto& s : shifts_) {
        auto it = indegree.find(u + s);
        if (it != indegree.end()) ++it->second;
      }
    std::vector<Rational> ready;
    for (const auto& [v, d] : indegree)
      if (d == 0) ready.push_back(v);
    std::mt19937_64 rng(options.seed);
    std::vector<Rational> order;
    while (!ready.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      const std::size_t idx = pick(rng);
      Rational u = ready[idx];
      ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(idx));
      order.push_back(u);
      for (const auto& s : shifts_) {
        auto it = indegree.find(u + s);
        if (it != indegree.end() && --it->second == 0) ready.push_back(it->first);
      }
    }
    return order;
  }

  CoefficientFunction divide_by_trace(const CoefficientFunction& p) const {
    if (constant_trace_) return scale(p, Rational(1 / trace0_));
    return truncate_tangential(p * inverse_, working_degree_);
  }

  const std::vector<std::vector<Rational>>& inverse_T(int m) {
    auto it = tinv_cache_.find(m);
    if (it != tinv_cache_.end()) return it->second;
    std::vector<std::vector<Rational>> inv(static_cast<std::size_t>(m + 1), std::vector<Rational>(m + 1));
    for (int j = 0; j <= m; ++j) {
      std::vector<Rational> e(static_cast<std::size_t>(m + 1), Rational(0));
      e[static_cast<std::size_t>(j)] = 1;
      const auto col = solve_T(m, e);
      for (int l = 0; l <= m; ++l) inv[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] = col[static_cast<std::size_t>(l)];
    }
    return tinv_cache_.emplace(m, std::move(inv)).first->second;
  }

  /// The correction sum_p c_p x_n^{e+2 sigma} (log x_n)^p cancelling the target block at x_n^e.
  SPoly correction(const SPoly& R, const Rational& e) {
    std::vector<CoefficientFunction> r;
    for (const auto& [key, c] : R.terms()) {
      if (key.e != e || !is_target(key)) continue;
      if (r.size() <= static_cast<std::size_t>(key.logpow))
        r.resize(static_cast<std::size_t>(key.logpow) + 1, CoefficientFunction(gamma_, dims_));
      MonomialKey k = key;
      k.e = 0;
      k.logpow = 0;
      r[static_cast<std::size_t>(key.logpow)].accumulate(k, c);
    }
    if (r.empty()) return SPoly(gamma_, dims_);

    const Rational E = e + 2 * gamma_.sigma();
    const std::vector<CoefficientFunction> c = solve_block(r, E, e);
    SPoly delta(gamma_, dims_);
    for (std::size_t p = 0; p < c.size(); ++p)
      if (!c[p].empty()) delta = delta + lift(divide_by_trace(c[p]), E, static_cast<int>(p));
    return delta;
  }

  /// Solves sum_p c_p [E(E-1) z^p + p(2E-1) z^{p-1} + p(p-1) z^{p-2}] = sum_q r_q z^q for c.
  std::vector<CoefficientFunction> solve_block(const std::vector<CoefficientFunction>& r, const Rational& E,
                                               const Rational& e) {
    const int Q = static_cast<int>(r.size()) - 1;
    const Rational EE = E * (E - 1);
    const CoefficientFunction zero(gamma_, dims_);
    auto rq = [&](int q) -> const CoefficientFunction& { return q <= Q ? r[static_cast<std::size_t>(q)] : zero; };

    if (EE == 0) {
      if (!gamma_.is_log_case())
        throw ResonanceError("exponent x_n^" + to_string(E) + " is resonant for x_n^gamma D_nn");
      // c_0 is free and set to zero; rows are (q+1)(2E-1) c_{q+1} + (q+2)(q+1) c_{q+2} = r_q.
      std::vector<CoefficientFunction> c(static_cast<std::size_t>(Q + 3), zero);
      const Rational twoE1 = 2 * E - 1;
      for (int q = Q; q >= 0; --q) {
        CoefficientFunction rhs = rq(q) - scale(c[static_cast<std::size_t>(q + 2)], Rational((q + 2) * (q + 1)));
        c[static_cast<std::size_t>(q + 1)] = scale(rhs, Rational(1 / (twoE1 * (q + 1))));
      }
      return c;
    }

    const Rational twice = 2 * e;
    if (gamma_.is_log_case() && is_integer(twice) && twice >= 1 && Q <= twice.get_num().get_si() + 1)
      return solve_with_T(r, EE, static_cast<int>(twice.get_num().get_si()));
    return back_substitute(r, E);
  }

  std::vector<CoefficientFunction> back_substitute(const std::vector<CoefficientFunction>& r, const Rational& E) const {
    const int Q = static_cast<int>(r.size()) - 1;
    const Rational EE = E * (E - 1);
    const CoefficientFunction zero(gamma_, dims_);
    std::vector<CoefficientFunction> c(static_cast<std::size_t>(Q + 3), zero);
    for (int p = Q; p >= 0; --p) {
      CoefficientFunction rhs = r[static_cast<std::size_t>(p)] -
                                scale(c[static_cast<std::size_t>(p + 1)], Rational((p + 1) * (2 * E - 1))) -
                                scale(c[static_cast<std::size_t>(p + 2)], Rational((p + 2) * (p + 1)));
      c[static_cast<std::size_t>(p)] = scale(rhs, Rational(1 / EE));
    }
    return c;
  }

  /// gamma = 1, e = m/2: unknowns c_1..c_{m+1} through T^m plus the non-log unknown c_0.
  std::vector<CoefficientFunction> solve_with_T(const std::vector<CoefficientFunction>& r, const Rational& EE, int m) {
    const auto& inv = inverse_T(m);
    const CoefficientFunction zero(gamma_, dims_);
    auto rq = [&](int q) -> const CoefficientFunction& {
      return static_cast<std::size_t>(q) < r.size() ? r[static_cast<std::size_t>(q)] : zero;
    };
    std::vector<CoefficientFunction> xa(static_cast<std::size_t>(m + 1), zero);
    for (int l = 0; l <= m; ++l)
      for (int j = 0; j <= m; ++j) {
        const Rational& w = inv[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        if (w != 0 && !rq(j).empty()) xa[static_cast<std::size_t>(l)] = xa[static_cast<std::size_t>(l)] + scale(rq(j), w);
      }
    const Rational xb_m = inv[static_cast<std::size_t>(m)][0];
    if (xb_m == 0) throw DivisionError("T^m inverse has a vanishing corner entry");
    const CoefficientFunction target = scale(rq(m + 1), Rational(1 / EE));
    const CoefficientFunction c0 = scale(xa[static_cast<std::size_t>(m)] - target, Rational(1 / (EE * xb_m)));
    std::vector<CoefficientFunction> c(static_cast<std::size_t>(m + 2), zero);
    c[0] = c0;
    for (int l = 0; l <= m; ++l)
      c[static_cast<std::size_t>(l + 1)] =
          xa[static_cast<std::size_t>(l)] - scale(c0, Rational(EE * inv[static_cast<std::size_t>(l)][0]));
    return c;
  }

  const DegenerateOperator& L_;
  Gamma gamma_;
  std::size_t dims_;
  Rational threshold_;
  Rational working_degree_;
  CoefficientFunction trace_;
  Rational trace0_;
  bool constant_trace_ = true;
  CoefficientFunction inverse_{gamma_, dims_};
  std::vector<Rational> shifts_;
  std::map<int, std::vector<std::vector<Rational>>> tinv_cache_;
};

void require_matching(const DegenerateOperator& L, const Gamma& g, std::size_t dims) {
  if (!(L.gamma() == g) || L.tangential_dims() != dims) throw IncompatibleError("data does not match the operator");
  if (!L.is_symbolic()) throw UnsupportedError("the cancellation engines need symbolic coefficients");
}

}  // namespace

Construction construct_particular_solution(const DegenerateOperator& Lp, const Expansion& f, const Rational& kappa,
                                           const EngineOptions& options) {
  require_matching(Lp, f.gamma(), f.tangential_dims());
  require_nonresonant_kappa(kappa, Lp.gamma());
  const Rational threshold = Lp.gamma().sigma() * (kappa - 2);
  CancellationEngine engine(Lp, threshold, options.working_degree.value_or(kappa));
  SPoly seed(Lp.gamma(), Lp.tangential_dims());
  return engine.run(seed, f.flatten(), options);
}

Expansion particular_solution(const DegenerateOperator& Lp, const Expansion& f, const Rational& kappa,
                              const EngineOptions& options) {
  return construct_particular_solution(Lp, f, kappa, options).expansion;
}

Construction construct_interior_expansion(const DegenerateOperator& Lp, const CoefficientFunction& U0, int M, int N,
                                          const EngineOptions& options) {
  if (Lp.gamma().is_log_case()) throw UnsupportedError("the interior expansion is only available for gamma < 1");
  if (M < 1 || N < 1) throw std::invalid_argument("interior expansion needs M, N >= 1");
  require_matching(Lp, U0.gamma(), U0.tangential_dims());
  require_coefficient_function(U0, "boundary datum");
  const Rational& sigma = Lp.gamma().sigma();
  const Rational threshold = M + sigma * (N - 2);
  const Rational kappa = Rational(M) / sigma + N;
  CancellationEngine engine(Lp, threshold, options.working_degree.value_or(kappa));
  return engine.run(lift(U0, Rational(1), 0), SPoly(Lp.gamma(), Lp.tangential_dims()), options);
}

Expansion interior_expansion(const DegenerateOperator& Lp, const CoefficientFunction& U0, int M, int N,
                             const EngineOptions& options) {
  return construct_interior_expansion(Lp, U0, M, N, options).expansion;
}

SPoly to_s_polynomial(const Expansion& E, const Rational& kappa) { return truncate(E.flatten(), kappa); }

}  // namespace schauder
