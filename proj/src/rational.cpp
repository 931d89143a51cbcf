#include "schauder/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace schauder {

namespace {

bool valid_integer_text(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational make_rational(long p, long q) {
  if (q == 0) throw std::invalid_argument("zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t first = 0;
  while (first < s.size() && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
  s = s.substr(first);

  const auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_integer_text(num) || !valid_integer_text(den) || den[0] == '-' || den[0] == '+')
    throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
  if (num[0] == '+') num.erase(0, 1);
  Rational q;
  q.get_num() = mpz_class(num, 10);
  q.get_den() = mpz_class(den, 10);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational ipow(const Rational& base, long n) {
  if (n < 0) {
    if (base == 0) throw std::domain_error("zero to a negative power");
    return ipow(Rational(1) / base, -n);
  }
  Rational result(1);
  mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(n));
  mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(n));
  result.canonicalize();
  return result;
}

std::optional<Rational> exact_root(const Rational& x, unsigned long k) {
  if (k == 0) return std::nullopt;
  if (k == 1) return x;
  if (x < 0 && k % 2 == 0) return std::nullopt;
  mpz_class num, den;
  if (mpz_root(num.get_mpz_t(), x.get_num_mpz_t(), k) == 0) return std::nullopt;
  if (mpz_root(den.get_mpz_t(), x.get_den_mpz_t(), k) == 0) return std::nullopt;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::optional<Rational> rational_pow(const Rational& base, const Rational& exponent) {
  if (base == 0) {
    if (exponent > 0) return Rational(0);
    if (exponent == 0) return Rational(1);
    return std::nullopt;
  }
  if (!exponent.get_den().fits_ulong_p() || !exponent.get_num().fits_slong_p()) return std::nullopt;
  const auto root = exact_root(base, exponent.get_den().get_ui());
  if (!root) return std::nullopt;
  return ipow(*root, exponent.get_num().get_si());
}

}  // namespace schauder
