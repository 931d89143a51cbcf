#pragma once

#include <string_view>

#include "schauder/rational.hpp"

namespace schauder {

/// The weight exponent of x_n^gamma, restricted to rationals with gamma <= 1.
class Gamma {
 public:
  /// Throws std::invalid_argument when value > 1.
  explicit Gamma(Rational value);
  static Gamma parse(std::string_view text);

  const Rational& value() const noexcept { return value_; }
  /// (2 - gamma) / 2, the exponent of the intrinsic normal coordinate.
  const Rational& sigma() const noexcept { return sigma_; }
  bool is_log_case() const noexcept { return value_ == 1; }

  double value_d() const noexcept { return value_d_; }
  double sigma_d() const noexcept { return sigma_d_; }

  friend bool operator==(const Gamma& a, const Gamma& b) { return a.value_ == b.value_; }

 private:
  Rational value_;
  Rational sigma_;
  double value_d_;
  double sigma_d_;
};

}  // namespace schauder
