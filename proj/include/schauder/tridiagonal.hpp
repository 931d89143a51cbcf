#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "schauder/errors.hpp"

namespace schauder {

/// Thomas elimination for a tridiagonal system without pivoting.
/// sub[i] = A(i+1, i), sup[i] = A(i, i+1). Works for exact and floating scalars.
template <class T>
std::vector<T> thomas_solve(const std::vector<T>& sub, const std::vector<T>& diag, const std::vector<T>& sup,
                            std::vector<T> rhs) {
  const std::size_t n = diag.size();
  if (rhs.size() != n || (n > 0 && (sub.size() + 1 != n || sup.size() + 1 != n)))
    throw std::invalid_argument("tridiagonal system has inconsistent sizes");
  if (n == 0) return rhs;
  std::vector<T> c(n);
  T pivot = diag[0];
  if (pivot == T(0)) throw DivisionError("zero pivot in tridiagonal elimination");
  if (n > 1) c[0] = T(sup[0] / pivot);
  rhs[0] = T(rhs[0] / pivot);
  for (std::size_t i = 1; i < n; ++i) {
    pivot = T(diag[i] - sub[i - 1] * c[i - 1]);
    if (pivot == T(0)) throw DivisionError("zero pivot in tridiagonal elimination");
    if (i + 1 < n) c[i] = T(sup[i] / pivot);
    rhs[i] = T((rhs[i] - sub[i - 1] * rhs[i - 1]) / pivot);
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = T(rhs[i] - c[i] * rhs[i + 1]);
  return rhs;
}

/// Determinant through the continuant recurrence.
template <class T>
T tridiagonal_determinant(const std::vector<T>& sub, const std::vector<T>& diag, const std::vector<T>& sup) {
  if (diag.empty()) return T(1);
  T prev2(1);
  T prev1 = diag[0];
  for (std::size_t k = 1; k < diag.size(); ++k) {
    T next = T(diag[k] * prev1 - sub[k - 1] * sup[k - 1] * prev2);
    prev2 = prev1;
    prev1 = next;
  }
  return prev1;
}

}  // namespace schauder
