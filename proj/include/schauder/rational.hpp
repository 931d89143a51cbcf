#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace schauder {

using Rational = mpq_class;

/// p / q in canonical form. Throws std::invalid_argument for q = 0.
Rational make_rational(long p, long q);

/// Parses "p/q" or "p" (optional sign). Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" text; integers print without a denominator.
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) { return q.get_d(); }

bool is_integer(const Rational& q);

/// Integer power with negative exponents allowed for nonzero base.
Rational ipow(const Rational& base, long n);

/// Exact k-th root when it is rational, otherwise nullopt.
std::optional<Rational> exact_root(const Rational& x, unsigned long k);

/// base^exponent when the result is rational, otherwise nullopt.
std::optional<Rational> rational_pow(const Rational& base, const Rational& exponent);

}  // namespace schauder
