#pragma once

#include <string>
#include <vector>

#include "schauder/fdsolver.hpp"
#include "schauder/operator.hpp"
#include "schauder/spoly.hpp"

namespace schauder {

/// Exact solution of u_t = x^gamma u_xx + 1 in one dimension:
///   t^2 x / 2 - x^{2-g} / ((2-g)(1-g)) + t x^{3-g} / ((3-g)(2-g)) + x^{5-2g} / ((5-2g)(4-2g)(3-g)(2-g))
/// for gamma < 1, and t^2 x / 2 - x log x + t x^2 / 2 + x^3 / 12 for gamma = 1.
SPoly model_oracle(const Gamma& gamma);

/// The oracle without its x^{5-2g} term; the two differ by that single term.
SPoly model_three_term(const Gamma& gamma);

/// The oracle as a field, continuous up to x_n = 0 for every gamma.
Field model_oracle_field(const Gamma& gamma);

/// Forward-time CEV operator (vol^2 / 2) x^gamma D_xx + rate x D_x - rate: a^{nn} = vol^2 / 2,
/// b^n = rate x_n^sigma, c = -rate.
DegenerateOperator cev_operator(const Gamma& gamma, const Rational& vol = Rational(2, 5),
                                const Rational& rate = Rational(1, 20));

struct BuiltinEntry {
  std::string name;
  std::string category;  ///< "problem" or "barrier"
  std::string description;
};

std::vector<BuiltinEntry> list_builtins();

/// Problems on the unit half-cube with T from the grid:
///   model_1d     u_t = x^g u_xx + 1, data from the oracle
///   homogeneous  u_t = x^g u_xx + 1, zero initial and boundary data
///   nonpositive  u_t = x^g u_xx - 1, g0 = -x(1 - x), zero boundary data
///   zero         all data zero
///   cev_call     CEV operator, g0 = max(x - 1/2, 0), g(1, t) = 1 - e^{-rate t} / 2
IBVP builtin_problem(const std::string& name, const Gamma& gamma);

/// Oracle field of a built-in problem when one is known (model_1d, zero).
bool builtin_has_oracle(const std::string& name);
Field builtin_oracle(const std::string& name, const Gamma& gamma);

}  // namespace schauder
