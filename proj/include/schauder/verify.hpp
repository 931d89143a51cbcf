#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "schauder/fdsolver.hpp"
#include "schauder/metric.hpp"
#include "schauder/spoly.hpp"

namespace schauder {

using Evaluable = std::function<double(const Point&)>;

Evaluable as_evaluable(const SPoly& p);
/// Keeps a copy of the solution alive inside the closure.
Evaluable as_evaluable(const DiscreteSolution& sol);

/// intrinsic: |x_n^sigma - y_n^sigma| < r. standard: |x_n - y_n| < r.
/// Both use |x_i - y_i| < r, tau - r^2 < t <= tau and x_n >= 0.
enum class CubeKind { intrinsic, standard };

struct DeviationOptions {
  int samples = 4096;
  std::uint64_t seed = 1;
  CubeKind cube = CubeKind::intrinsic;
  int threads = 1;
};

struct DeviationRow {
  double r = 0.0;
  double sup = 0.0;
  Point argmax;
};

/// Stratified sample of the closed cube plus its corners and face midpoints.
std::vector<Point> sample_cube(const Point& center, double r, const Gamma& gamma, CubeKind kind, int samples,
                               std::uint64_t seed);

/// max |u - p| over each cube. Points drawn for every radius are reused by the smaller cubes that
/// contain them, so the rows are non-decreasing in r. Radii must be strictly decreasing in (0, 1/2].
std::vector<DeviationRow> sup_deviation(const Evaluable& u, const Evaluable& p, const Point& center,
                                        const std::vector<double>& radii, const Gamma& gamma,
                                        const DeviationOptions& options = {});

/// max |u_h - p| over the mesh nodes and stored time levels inside each cube.
std::vector<DeviationRow> sup_deviation_nodes(const DiscreteSolution& sol, const Evaluable& p, const Point& center,
                                              const std::vector<double>& radii, const Gamma& gamma,
                                              CubeKind cube = CubeKind::intrinsic);

struct FitReport {
  std::vector<DeviationRow> rows;
  std::optional<double> kappa_hat;  ///< empty for an exact fit
  double C_hat = 0.0;
  double r2 = 0.0;
  bool exact = false;
  std::size_t used_rows = 0;
};

/// Least squares of log sup against log r. Zero rows are dropped; all-zero rows give an exact fit.
FitReport fit_exponent(const std::vector<DeviationRow>& rows);

/// 2^{-2}, ..., 2^{-7}.
std::vector<double> dyadic_radii(int first = 2, int last = 7);

struct GrowthOptions {
  std::size_t tangential_dims = 0;
  std::vector<double> times{0.0};
  int samples = 64;
  std::uint64_t seed = 1;
};

struct GrowthRow {
  double xn = 0.0;
  double ratio = 0.0;
};

/// Per level, max of |u| / x_n (gamma < 1) or |u| / (-x_n log x_n) (gamma = 1) over sampled x' in
/// [-1/2, 1/2]^{n-1} and the given times. Levels must lie in (0, 1/2].
std::vector<GrowthRow> boundary_growth_ratio(const Evaluable& u, const Gamma& gamma, const std::vector<double>& levels,
                                             const GrowthOptions& options = {});

/// Ratio at the smallest level is at most `factor` times the ratio at the largest level.
bool growth_bounded(const std::vector<GrowthRow>& rows, double factor = 2.0);

struct HolderDomain {
  std::size_t tangential_dims = 0;
  double xprime_half_width = 0.5;
  double yn_max = 0.5;  ///< bound on x_n^sigma
  double t_min = -0.25;
  double t_max = 0.0;
};

/// sup over sampled pairs of |u(X) - u(Y)| / s[X, Y]^alpha; half the pairs are close pairs.
double holder_norm_estimate(const Evaluable& u, double alpha, const Gamma& gamma, int samples,
                            const HolderDomain& domain = {}, std::uint64_t seed = 1);

}  // namespace schauder
