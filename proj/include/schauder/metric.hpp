#pragma once

#include <vector>

#include "schauder/gamma.hpp"
#include "schauder/rational.hpp"

namespace schauder {

/// A space-time point (x', x_n, t) of the closed upper half-space.
template <class T>
struct BasicPoint {
  std::vector<T> xprime;
  T xn{};
  T t{};

  friend bool operator==(const BasicPoint&, const BasicPoint&) = default;
};

using Point = BasicPoint<double>;
using PointQ = BasicPoint<Rational>;

Point to_double(const PointQ& p);

/// s[X, Y] = max(|x_i - y_i|, |x_n^sigma - y_n^sigma|, sqrt|t - tau|).
double intrinsic_distance(const Point& x, const Point& y, const Gamma& gamma);

/// d[X, Y] = max(|x_i - y_i| over all i <= n, sqrt|t - tau|).
double parabolic_distance(const Point& x, const Point& y);

/// rX = (r x', r^{1/sigma} x_n, r^2 t), scaling about the origin.
Point intrinsic_scale(const Point& x, double r, const Gamma& gamma);

/// Exact s[X, Y]^2. Throws DomainError when x_n^sigma or y_n^sigma is irrational.
Rational intrinsic_distance_squared(const PointQ& x, const PointQ& y, const Gamma& gamma);

/// Exact rX. Throws DomainError when r^{1/sigma} is irrational.
PointQ intrinsic_scale(const PointQ& x, const Rational& r, const Gamma& gamma);

/// Q_r^+(Y): |x_i - y_i| < r, |x_n^sigma - y_n^sigma| < r, tau - r^2 < t <= tau.
struct IntrinsicCube {
  Point center;
  double r;
  Gamma gamma;
};

bool in_intrinsic_cube(const Point& x, const IntrinsicCube& cube);

}  // namespace schauder
