#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schauder {

/// A monomial that is not part of the basis for the given gamma.
struct InvalidBasisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operands with different gamma, dimension or center.
struct IncompatibleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the domain of a term (singular or log term at x_n = 0).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Feature outside the supported range (numeric coefficients in symbolic code, gamma = 1 hierarchy).
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Division by a coefficient whose boundary trace has no invertible constant term.
struct DivisionError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Operator data violating ellipticity, sign or bound requirements.
struct InvalidOperatorError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parameter choice that collides with the degree set.
struct ResonanceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InsufficientDataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace schauder
