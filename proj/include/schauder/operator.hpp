#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "schauder/gamma.hpp"
#include "schauder/metric.hpp"
#include "schauder/spoly.hpp"

namespace schauder {

/// Black-box coefficient field. Must be safe to call concurrently.
using Field = std::function<double(const Point&)>;

/// A coefficient of L: identically zero, an s-polynomial, or an evaluable field.
class CoefficientSpec {
 public:
  CoefficientSpec() = default;
  CoefficientSpec(SPoly p) : value_(std::move(p)) {}
  CoefficientSpec(Field f) : value_(std::move(f)) {}

  bool is_zero() const;
  bool is_symbolic() const { return !std::holds_alternative<Field>(value_); }
  /// Null for zero and numeric specs.
  const SPoly* spoly() const { return std::get_if<SPoly>(&value_); }
  double operator()(const Point& x) const;

 private:
  std::variant<std::monostate, SPoly, Field> value_;
};

/// L u = a^{i'j'} u_{i'j'} + 2 x_n^{gamma/2} a^{i'n} u_{i'n} + x_n^gamma a^{nn} u_{nn}
///       + b^{i'} u_{i'} + x_n^{gamma/2} b^n u_n + c u.
/// Index n-1 is the normal direction.
class DegenerateOperator {
 public:
  /// `a` is n x n and read through its upper triangle; symbolic entries must be symmetric.
  DegenerateOperator(Gamma gamma, std::vector<std::vector<CoefficientSpec>> a, std::vector<CoefficientSpec> b,
                     CoefficientSpec c, double lambda, double Lambda);

  /// x_n^gamma D_nn in one space dimension.
  static DegenerateOperator model(const Gamma& gamma);
  /// Constant rational coefficients; A is n x n symmetric, B has length n.
  static DegenerateOperator constant(const Gamma& gamma, const std::vector<std::vector<Rational>>& A,
                                     const std::vector<Rational>& B, const Rational& C, double lambda,
                                     double Lambda);

  const Gamma& gamma() const noexcept { return gamma_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t tangential_dims() const noexcept { return n_ - 1; }
  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }

  const CoefficientSpec& a(std::size_t i, std::size_t j) const { return i <= j ? a_[i][j] : a_[j][i]; }
  const CoefficientSpec& b(std::size_t i) const { return b_.at(i); }
  const CoefficientSpec& c() const noexcept { return c_; }

  bool is_symbolic() const;
  /// True when every coefficient is zero or a constant s-polynomial.
  bool has_constant_coefficients() const;

 private:
  Gamma gamma_;
  std::size_t n_;
  std::vector<std::vector<CoefficientSpec>> a_;
  std::vector<CoefficientSpec> b_;
  CoefficientSpec c_;
  double lambda_;
  double Lambda_;
};

/// Exponent bookkeeping of the weighted derivatives on single monomials.
struct WeightedDerivativeTable {
  using Image = std::vector<std::pair<MonomialKey, Rational>>;
  /// x_n^{gamma/2} D_n: e -> e - sigma with factor e, plus the log correction.
  static Image normal(const MonomialKey& key, const Gamma& gamma);
  /// x_n^gamma D_nn: e -> e - 2 sigma with factor e(e-1), plus log corrections.
  static Image normal_normal(const MonomialKey& key, const Gamma& gamma);
};

SPoly weighted_normal(const SPoly& u);
SPoly weighted_normal_normal(const SPoly& u);
/// x_n^{gamma/2} D_{i'n} u.
SPoly weighted_tangential_normal(const SPoly& u, int i);

/// L u for a symbolic operator. Throws UnsupportedError for numeric coefficients.
SPoly apply(const DegenerateOperator& L, const SPoly& u);

/// u_t - L u - f.
SPoly residual(const DegenerateOperator& L, const SPoly& u, const SPoly& f);

/// Coefficient values at a point, raw and with the x_n weights multiplied in.
struct CoefficientSet {
  std::size_t n = 0;
  std::vector<double> a;  ///< row-major n x n
  std::vector<double> b;
  double c = 0.0;
  std::vector<double> a_weighted;
  std::vector<double> b_weighted;
  std::vector<bool> a_singular;
  std::vector<bool> b_singular;

  double a_at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double a_weighted_at(std::size_t i, std::size_t j) const { return a_weighted[i * n + j]; }
  bool singular_at(std::size_t i, std::size_t j) const { return a_singular[i * n + j]; }
};

CoefficientSet eval_coefficients(const DegenerateOperator& L, const Point& x);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  double min_eigen_ratio = 0.0;  ///< smallest sampled a(X) xi.xi / |xi|^2
  double max_eigen_ratio = 0.0;
  double max_c = 0.0;
  double lower_order_bound = 0.0;  ///< sum of sup |b^i| plus sup |c|
};

struct SamplingBox {
  double t_min = -1.0;
  double t_max = 1.0;
  int nodes_per_axis = 5;
  int directions = 16;
  std::uint64_t seed = 7;
};

/// Spot-checks ellipticity, c <= 0 and the lower-order bound on a grid of points.
ValidationReport validate(const DegenerateOperator& L, const SamplingBox& box = {});

/// Throws InvalidOperatorError listing the violations when validate fails.
void require_valid(const DegenerateOperator& L, const SamplingBox& box = {});

}  // namespace schauder
