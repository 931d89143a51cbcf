#include "schauder/spoly_json.hpp"

#include <set>
#include <stdexcept>

namespace schauder {

nlohmann::json spoly_to_json(const SPoly& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, c] : p.terms()) {
    out.push_back({{"beta", key.beta},
                   {"e", to_string(key.e)},
                   {"log", key.logpow},
                   {"t", key.l},
                   {"coeff", to_string(c)}});
  }
  return out;
}

SPoly spoly_from_json(const nlohmann::json& j, const Gamma& gamma, std::size_t dims) {
  if (!j.is_array()) throw std::invalid_argument("s-polynomial JSON must be an array of terms");
  static const std::set<std::string> allowed{"beta", "e", "log", "t", "coeff"};
  SPoly p(gamma, dims);
  for (const auto& term : j) {
    if (!term.is_object()) throw std::invalid_argument("s-polynomial term must be an object");
    for (const auto& [name, value] : term.items())
      if (!allowed.count(name)) throw std::invalid_argument("unknown s-polynomial term field '" + name + "'");
    MonomialKey key;
    key.beta = term.value("beta", std::vector<int>(dims, 0));
    key.e = parse_rational(term.value("e", std::string("0")));
    key.logpow = term.value("log", 0);
    key.l = term.value("t", 0);
    if (!term.contains("coeff")) throw std::invalid_argument("s-polynomial term without coeff");
    const auto& cj = term.at("coeff");
    Rational c = cj.is_string() ? parse_rational(cj.get<std::string>()) : Rational(cj.get<long>());
    validate_key(key, gamma, dims);
    p.accumulate(key, c);
  }
  return p;
}

}  // namespace schauder
