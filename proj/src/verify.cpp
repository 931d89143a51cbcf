#include "schauder/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "schauder/errors.hpp"

namespace schauder {

Evaluable as_evaluable(const SPoly& p) {
  auto q = std::make_shared<const SPoly>(p);
  return [q](const Point& x) { return q->evaluate(x); };
}

Evaluable as_evaluable(const DiscreteSolution& sol) {
  auto s = std::make_shared<const DiscreteSolution>(sol);
  return [s](const Point& x) { return s->value(x); };
}

namespace {

struct UnitSample {
  std::vector<double> xprime;  ///< in [-1, 1]
  double w = 0.0;              ///< normal coordinate offset in [-1, 1]
  double s = 0.0;              ///< time offset in [0, 1], t = tau - s r^2
};

/// Latin hypercube over (x', w, s) followed by every corner and face midpoint of the box.
std::vector<UnitSample> unit_samples(std::size_t dims, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t coords = dims + 2;
  const std::size_t n = static_cast<std::size_t>(std::max(samples, 0));
  std::vector<std::vector<std::size_t>> perms(coords, std::vector<std::size_t>(n));
  for (auto& perm : perms) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
  }
  std::vector<UnitSample> out;
  out.reserve(n + 64);
  auto stratum = [&](std::size_t c, std::size_t i) { return (static_cast<double>(perms[c][i]) + unit(rng)) / n; };
  for (std::size_t i = 0; i < n; ++i) {
    UnitSample u;
    for (std::size_t c = 0; c < dims; ++c) u.xprime.push_back(2 * stratum(c, i) - 1);
    u.w = 2 * stratum(dims, i) - 1;
    u.s = stratum(dims + 1, i);
    out.push_back(std::move(u));
  }
  // Corners and face midpoints: each coordinate at its low end, midpoint or high end, with at
  // most one coordinate away from the ends for the face midpoints.
  std::vector<int> level(coords, 0);
  const std::size_t total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(coords)));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    int mids = 0;
    for (std::size_t k = 0; k < coords; ++k) {
      level[k] = static_cast<int>(c % 3);
      c /= 3;
      if (level[k] == 1) ++mids;
    }
    if (mids > 1 && mids != static_cast<int>(coords)) continue;
    UnitSample u;
    for (std::size_t k = 0; k < dims; ++k) u.xprime.push_back(level[k] - 1.0);
    u.w = level[dims] - 1.0;
    u.s = level[dims + 1] / 2.0;
    out.push_back(std::move(u));
  }
  return out;
}

/// Maps a unit sample into the cube of radius r around the center.
Point place(const UnitSample& u, const Point& center, double r, const Gamma& gamma, CubeKind kind) {
  Point x;
  for (std::size_t i = 0; i < u.xprime.size(); ++i) x.xprime.push_back(center.xprime[i] + r * u.xprime[i]);
  const double sigma = gamma.sigma_d();
  if (kind == CubeKind::intrinsic) {
    const double yc = std::pow(center.xn, sigma);
    const double lo = std::max(0.0, yc - r);
    const double y = lo + (u.w + 1) / 2 * (yc + r - lo);
    x.xn = y <= 0 ? 0.0 : std::pow(y, 1 / sigma);
  } else {
    const double lo = std::max(0.0, center.xn - r);
    x.xn = lo + (u.w + 1) / 2 * (center.xn + r - lo);
  }
  x.t = center.t - u.s * r * r;
  return x;
}

bool inside(const Point& x, const Point& c, double r, const Gamma& gamma, CubeKind kind) {
  if (kind == CubeKind::intrinsic) return in_intrinsic_cube(x, IntrinsicCube{c, r, gamma});
  if (x.xn < 0) return false;
  for (std::size_t i = 0; i < x.xprime.size(); ++i)
    if (!(std::abs(x.xprime[i] - c.xprime[i]) <= r)) return false;
  const double tol = 1e-12 * (1 + r);
  return std::abs(x.xn - c.xn) <= r + tol && x.t <= c.t + tol && x.t >= c.t - r * r - tol;
}

/// Closed-cube membership with a relative tolerance, so corners and faces count.
bool inside_closed(const Point& x, const Point& c, double r, const Gamma& gamma, CubeKind kind) {
  const double tol = 1e-12 * (1 + r);
  if (x.xn < 0) return false;
  for (std::size_t i = 0; i < x.xprime.size(); ++i)
    if (std::abs(x.xprime[i] - c.xprime[i]) > r + tol) return false;
  if (x.t > c.t + tol || x.t < c.t - r * r - tol) return false;
  if (kind == CubeKind::intrinsic) {
    const double s = gamma.sigma_d();
    return std::abs(std::pow(x.xn, s) - std::pow(c.xn, s)) <= r + tol;
  }
  return inside(x, c, r, gamma, kind);
}

std::string describe(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (double v : x.xprime) os << v << ", ";
  os << "x_n=" << x.xn << ", t=" << x.t << ")";
  return os.str();
}

}  // namespace

std::vector<Point> sample_cube(const Point& center, double r, const Gamma& gamma, CubeKind kind, int samples,
                               std::uint64_t seed) {
  std::vector<Point> pts;
  for (const auto& u : unit_samples(center.xprime.size(), samples, seed)) pts.push_back(place(u, center, r, gamma, kind));
  return pts;
}

std::vector<DeviationRow> sup_deviation(const Evaluable& u, const Evaluable& p, const Point& center,
                                        const std::vector<double>& radii, const Gamma& gamma,
                                        const DeviationOptions& options) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0 && radii[i] <= 0.5)) throw std::invalid_argument("radii must lie in (0, 1/2]");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument("radii must be strictly decreasing");
  }
  if (center.xn < 0) throw DomainError("cube center must satisfy x_n >= 0");

  struct Eval {
    Point x;
    double dev;
  };
  auto evaluate_radius = [&](std::size_t i) {
    std::vector<Eval> out;
    for (const auto& x : sample_cube(center, radii[i], gamma, options.cube, options.samples, options.seed + i)) {
      double d;
      try {
        d = std::abs(u(x) - p(x));
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at " + describe(x));
      }
      out.push_back({x, d});
    }
    return out;
  };

  std::vector<std::vector<Eval>> per_radius(radii.size());
  if (options.threads > 1) {
    std::vector<std::future<std::vector<Eval>>> jobs;
    for (std::size_t i = 0; i < radii.size(); ++i) jobs.push_back(std::async(std::launch::async, evaluate_radius, i));
    for (std::size_t i = 0; i < radii.size(); ++i) per_radius[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < radii.size(); ++i) per_radius[i] = evaluate_radius(i);
  }

  std::vector<DeviationRow> rows;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    DeviationRow row{radii[i], 0.0, center};
    for (std::size_t j = i; j < radii.size(); ++j)
      for (const auto& e : per_radius[j]) {
        if (j != i && !inside_closed(e.x, center, radii[i], gamma, options.cube)) continue;
        if (e.dev > row.sup) {
          row.sup = e.dev;
          row.argmax = e.x;
        }
      }
    rows.push_back(row);
  }
  return rows;
}

std::vector<DeviationRow> sup_deviation_nodes(const DiscreteSolution& sol, const Evaluable& p, const Point& center,
                                              const std::vector<double>& radii, const Gamma& gamma, CubeKind cube) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0 && radii[i] <= 0.5)) throw std::invalid_argument("radii must lie in (0, 1/2]");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw std::invalid_argument("radii must be strictly decreasing");
  }
  const Grid& g = sol.grid();
  if (center.xprime.size() != static_cast<std::size_t>(g.dims - 1))
    throw IncompatibleError("center dimension does not match the grid");
  std::vector<DeviationRow> rows;
  for (double r : radii) rows.push_back({r, 0.0, center});
  for (std::size_t l = 0; l < sol.levels().size(); ++l) {
    const double t = sol.times()[l];
    if (!inside_closed(Point{center.xprime, center.xn, t}, Point{center.xprime, center.xn, center.t}, radii.front(), gamma, cube))
      continue;
    for (int j = 0; j < g.tangential_nodes(); ++j)
      for (int k = 0; k <= g.K; ++k) {
        const Point x = g.point(k, j, t);
        if (!inside_closed(x, center, radii.front(), gamma, cube)) continue;
        const double d = std::abs(sol.node(l, k, j) - p(x));
        for (auto& row : rows)
          if (d > row.sup && inside_closed(x, center, row.r, gamma, cube)) {
            row.sup = d;
            row.argmax = x;
          }
      }
  }
  return rows;
}

FitReport fit_exponent(const std::vector<DeviationRow>& rows) {
  FitReport rep;
  rep.rows = rows;
  std::vector<double> lx, ly;
  for (const auto& r : rows) {
    if (r.sup < 0 || !(r.r > 0)) throw std::invalid_argument("rows need r > 0 and sup >= 0");
    if (r.sup == 0) continue;
    lx.push_back(std::log(r.r));
    ly.push_back(std::log(r.sup));
  }
  rep.used_rows = lx.size();
  if (lx.empty() && !rows.empty()) {
    rep.exact = true;
    rep.r2 = 1.0;
    return rep;
  }
  if (lx.size() < 2) throw InsufficientDataError("fit needs at least two rows with positive deviation");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw InsufficientDataError("fit needs at least two distinct radii");
  const double slope = sxy / sxx;
  rep.kappa_hat = slope;
  rep.C_hat = std::exp(my - slope * mx);
  rep.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return rep;
}

std::vector<double> dyadic_radii(int first, int last) {
  std::vector<double> r;
  for (int k = first; k <= last; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

std::vector<GrowthRow> boundary_growth_ratio(const Evaluable& u, const Gamma& gamma, const std::vector<double>& levels,
                                             const GrowthOptions& options) {
  if (options.times.empty()) throw std::invalid_argument("growth ratio needs at least one time");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> half(-0.5, 0.5);
  std::vector<std::vector<double>> xs;
  const int count = options.tangential_dims == 0 ? 1 : std::max(options.samples, 1);
  for (int i = 0; i < count; ++i) {
    std::vector<double> xp;
    for (std::size_t k = 0; k < options.tangential_dims; ++k) xp.push_back(i == 0 ? 0.0 : half(rng));
    xs.push_back(std::move(xp));
  }
  std::vector<GrowthRow> rows;
  for (double xn : levels) {
    if (!(xn > 0 && xn <= 0.5)) throw std::invalid_argument("growth levels must lie in (0, 1/2]");
    const double gauge = gamma.is_log_case() ? -xn * std::log(xn) : xn;
    GrowthRow row{xn, 0.0};
    for (double t : options.times)
      for (const auto& xp : xs) row.ratio = std::max(row.ratio, std::abs(u(Point{xp, xn, t})) / gauge);
    rows.push_back(row);
  }
  return rows;
}

bool growth_bounded(const std::vector<GrowthRow>& rows, double factor) {
  if (rows.empty()) return true;
  auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                      [](const GrowthRow& a, const GrowthRow& b) { return a.xn < b.xn; });
  return lo->ratio <= factor * hi->ratio;
}

double holder_norm_estimate(const Evaluable& u, double alpha, const Gamma& gamma, int samples,
                            const HolderDomain& d, std::uint64_t seed) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("holder exponent must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sigma = gamma.sigma_d();
  auto random_point = [&]() {
    Point x;
    for (std::size_t k = 0; k < d.tangential_dims; ++k) x.xprime.push_back((2 * unit(rng) - 1) * d.xprime_half_width);
    x.xn = std::pow(unit(rng) * d.yn_max, 1 / sigma);
    x.t = d.t_min + unit(rng) * (d.t_max - d.t_min);
    return x;
  };
  auto nearby = [&](const Point& x) {
    const double h = std::pow(2.0, -2.0 - 16.0 * unit(rng));
    Point y = x;
    for (auto& v : y.xprime)
      v = std::clamp(v + h * (2 * unit(rng) - 1), -d.xprime_half_width, d.xprime_half_width);
    const double w = std::clamp(std::pow(x.xn, sigma) + h * (2 * unit(rng) - 1), 0.0, d.yn_max);
    y.xn = std::pow(w, 1 / sigma);
    y.t = std::clamp(x.t + h * h * (2 * unit(rng) - 1), d.t_min, d.t_max);
    return y;
  };
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Point x = random_point();
    const Point y = i % 2 == 0 ? random_point() : nearby(x);
    const double s = intrinsic_distance(x, y, gamma);
    if (s <= 0) continue;
    best = std::max(best, std::abs(u(x) - u(y)) / std::pow(s, alpha));
  }
  return best;
}

}  // namespace schauder
