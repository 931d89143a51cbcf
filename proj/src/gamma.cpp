#include "schauder/gamma.hpp"

#include <stdexcept>
#include <string>

namespace schauder {

Gamma::Gamma(Rational value) : value_(std::move(value)) {
  value_.canonicalize();
  if (value_ > 1) throw std::invalid_argument("gamma must satisfy gamma <= 1, got " + to_string(value_));
  sigma_ = (Rational(2) - value_) / 2;
  value_d_ = value_.get_d();
  sigma_d_ = sigma_.get_d();
}

Gamma Gamma::parse(std::string_view text) { return Gamma(parse_rational(text)); }

}  // namespace schauder
