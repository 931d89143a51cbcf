#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "schauder/operator.hpp"
#include "schauder/spoly.hpp"

namespace schauder {

/// A polynomial in (x', t): an SPoly whose keys all carry e = 0 and no log power.
using CoefficientFunction = SPoly;

bool is_coefficient_function(const SPoly& p);

struct ExpansionTerm {
  CoefficientFunction coef;
  Rational e;
  int logpow = 0;
};

/// sum of coef(x', t) x_n^e (log x_n)^logpow, sorted by (e, logpow).
class Expansion {
 public:
  Expansion(Gamma gamma, std::size_t tangential_dims);

  /// Groups the terms of p by (e, logpow).
  static Expansion from_spoly(const SPoly& p);

  /// Adds coef x_n^e (log x_n)^logpow, merging with an existing entry.
  void add(const CoefficientFunction& coef, const Rational& e, int logpow = 0);

  const Gamma& gamma() const noexcept { return gamma_; }
  std::size_t tangential_dims() const noexcept { return dims_; }
  const std::vector<ExpansionTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// Coefficient at (e, logpow), zero when absent.
  CoefficientFunction coefficient(const Rational& e, int logpow = 0) const;

  SPoly flatten() const;

  friend bool operator==(const Expansion& a, const Expansion& b);

 private:
  Gamma gamma_;
  std::size_t dims_;
  std::vector<ExpansionTerm> terms_;
};

bool operator==(const Expansion& a, const Expansion& b);

/// Options shared by the cancellation engines.
struct EngineOptions {
  enum class Order { ascending, random_topological };
  Order order = Order::ascending;
  std::uint64_t seed = 0;
  /// Tangential degree kept when dividing by a non-constant boundary trace.
  std::optional<Rational> working_degree;
};

/// Output of a cancellation run with its exact residual.
struct Construction {
  Expansion expansion;
  SPoly residual;
  std::vector<Rational> order;  ///< exponents processed, in processing order
  Rational threshold;
};

/// Lemma-style hierarchy v^N = sum U^i x_n^{1 + sigma i} for a constant-coefficient operator.
Expansion homogeneous_hierarchy(const DegenerateOperator& L0, const CoefficientFunction& U0, int N);

/// h with u_t - L_p u - f free of x_n exponents below sigma (kappa - 2).
Construction construct_particular_solution(const DegenerateOperator& Lp, const Expansion& f, const Rational& kappa,
                                           const EngineOptions& options = {});
Expansion particular_solution(const DegenerateOperator& Lp, const Expansion& f, const Rational& kappa,
                              const EngineOptions& options = {});

/// v = U0 x_n + sum v^{ij} x_n^{i + sigma j} with residual exponents >= M + sigma (N - 2).
Construction construct_interior_expansion(const DegenerateOperator& Lp, const CoefficientFunction& U0, int M, int N,
                                          const EngineOptions& options = {});
Expansion interior_expansion(const DegenerateOperator& Lp, const CoefficientFunction& U0, int M, int N,
                             const EngineOptions& options = {});

SPoly to_s_polynomial(const Expansion& E, const Rational& kappa);

/// T^m stored by diagonals: sub[l] = T(l+1, l), super[l] = T(l, l+1).
struct TridiagonalMatrix {
  int m = 0;
  std::vector<Rational> sub;
  std::vector<Rational> diag;
  std::vector<Rational> super;

  Rational at(std::size_t row, std::size_t col) const;
  Rational determinant() const;
};

TridiagonalMatrix tridiagonal_T(int m);
std::vector<Rational> solve_T(int m, const std::vector<Rational>& rhs);

/// Membership in the degree set {i + j / sigma}.
bool in_degree_set(const Rational& value, const Gamma& gamma);

/// Throws ResonanceError unless kappa = k + 2 + alpha with 0 < alpha < 1 and kappa outside the degree set.
void require_nonresonant_kappa(const Rational& kappa, const Gamma& gamma);

/// Coefficient of x_n^0 in a^{nn}: P^{nn}(x', 0, t).
CoefficientFunction boundary_trace(const DegenerateOperator& L);

}  // namespace schauder
