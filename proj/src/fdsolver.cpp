#include "schauder/fdsolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "schauder/tridiagonal.hpp"

namespace schauder {

void Grid::validate() const {
  if (dims != 1 && dims != 2) throw std::invalid_argument("grid dims must be 1 or 2");
  if (K < 2) throw std::invalid_argument("grid needs K >= 2");
  if (dims == 2 && tangential < 2) throw std::invalid_argument("grid needs at least 2 tangential intervals");
  if (steps < 1) throw std::invalid_argument("grid needs at least one time step");
  if (!(T > 0)) throw std::invalid_argument("horizon T must be positive");
}

double Grid::xn(int k) const {
  if (k == 0) return 0.0;
  if (k == K) return 1.0;
  return std::pow(y(k), 1.0 / gamma.sigma_d());
}

Point Grid::point(int k, int j, double t) const {
  Point p;
  if (dims == 2) p.xprime.push_back(x1(j));
  p.xn = xn(k);
  p.t = t;
  return p;
}

std::string to_string(Scheme s) { return s == Scheme::implicit_euler ? "implicit_euler" : "crank_nicolson"; }
std::string to_string(NormalStencil s) { return s == NormalStencil::y_chart ? "y_chart" : "fitted"; }

DiscreteSolution::DiscreteSolution(Grid grid, Scheme scheme, NormalStencil stencil)
    : grid_(std::move(grid)), scheme_(scheme), stencil_(stencil) {}

void DiscreteSolution::push_level(double t, std::vector<double> values) {
  if (values.size() != grid_.node_count()) throw std::invalid_argument("level has the wrong size");
  times_.push_back(t);
  levels_.push_back(std::move(values));
}

double DiscreteSolution::max_abs() const {
  double m = 0.0;
  for (const auto& lvl : levels_)
    for (double v : lvl) m = std::max(m, std::abs(v));
  return m;
}

double DiscreteSolution::value(const Point& x) const {
  const Grid& g = grid_;
  if (x.xprime.size() != static_cast<std::size_t>(g.dims - 1))
    throw IncompatibleError("point dimension does not match the grid");
  if (levels_.empty()) throw std::logic_error("solution has no stored levels");
  const double eps = 1e-12;
  const double y = std::pow(std::max(x.xn, 0.0), g.gamma.sigma_d());
  if (x.xn < 0 || y > 1 + eps || x.t < times_.front() - eps || x.t > times_.back() + eps) {
    std::ostringstream os;
    os << "point (x_n=" << x.xn << ", t=" << x.t << ") lies outside the mesh";
    throw DomainError(os.str());
  }
  auto locate = [](double u, int n) {
    u = std::clamp(u, 0.0, static_cast<double>(n));
    int i = std::min(static_cast<int>(std::floor(u)), n - 1);
    return std::pair<int, double>(i, u - i);
  };
  const auto [k, wy] = locate(y * g.K, g.K);
  int j = 0;
  double wx = 0.0;
  if (g.dims == 2) {
    if (std::abs(x.xprime[0]) > 1 + eps) throw DomainError("tangential coordinate outside [-1, 1]");
    std::tie(j, wx) = locate((x.xprime[0] + 1.0) / 2.0 * g.tangential, g.tangential);
  }
  std::size_t lvl = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), x.t) - times_.begin());
  lvl = std::clamp<std::size_t>(lvl, 1, times_.size() - 1 == 0 ? 1 : times_.size() - 1);
  double wt = 0.0;
  std::size_t l0 = 0, l1 = 0;
  if (times_.size() > 1) {
    l0 = lvl - 1;
    l1 = lvl;
    wt = std::clamp((x.t - times_[l0]) / (times_[l1] - times_[l0]), 0.0, 1.0);
  }
  auto spatial = [&](std::size_t l) {
    const auto& u = levels_[l];
    auto at = [&](int kk, int jj) { return u[g.index(kk, jj)]; };
    double lo = (1 - wy) * at(k, j) + wy * at(k + 1, j);
    if (g.dims == 1) return lo;
    double hi = (1 - wy) * at(k, j + 1) + wy * at(k + 1, j + 1);
    return (1 - wx) * lo + wx * hi;
  };
  return (1 - wt) * spatial(l0) + wt * spatial(l1);
}

TransformedCoefficients transform_operator(const DegenerateOperator& L) {
  const Rational& s = L.gamma().sigma();
  TransformedCoefficients tc;
  tc.sigma_squared = s * s;
  tc.drift_factor = s * (s - 1);
  const double s2 = tc.sigma_squared.get_d();
  const double df = tc.drift_factor.get_d();
  const double sd = s.get_d();
  const std::size_t nn = L.n() - 1;
  tc.diffusion_yy = [L, nn, s2](const Point& x) { return s2 * L.a(nn, nn)(x); };
  tc.drift_y = [L, nn, sd, df](const Point& x) {
    const double y = std::pow(x.xn, sd);
    const double singular = df == 0 ? 0.0 : df * L.a(nn, nn)(x) / y;
    return singular + sd * L.b(nn)(x);
  };
  if (L.n() >= 2) {
    tc.diffusion_11 = [L](const Point& x) { return L.a(0, 0)(x); };
    tc.mixed_1y = [L, nn, sd](const Point& x) { return 2 * sd * L.a(0, nn)(x); };
    tc.drift_1 = [L](const Point& x) { return L.b(0)(x); };
  } else {
    tc.diffusion_11 = tc.mixed_1y = tc.drift_1 = [](const Point&) { return 0.0; };
  }
  tc.reaction = [L](const Point& x) { return L.c()(x); };
  return tc;
}

namespace {

bool spec_depends_on_time(const CoefficientSpec& s) {
  if (s.is_zero()) return false;
  const SPoly* p = s.spoly();
  if (!p) return true;
  for (const auto& [key, c] : p->terms())
    if (key.l > 0) return true;
  return false;
}

bool operator_depends_on_time(const DegenerateOperator& L) {
  for (std::size_t i = 0; i < L.n(); ++i) {
    for (std::size_t j = i; j < L.n(); ++j)
      if (spec_depends_on_time(L.a(i, j))) return true;
    if (spec_depends_on_time(L.b(i))) return true;
  }
  return spec_depends_on_time(L.c());
}

struct Entry {
  std::size_t col;
  double value;
};

/// Spatial operator rows for the interior nodes; boundary rows are Dirichlet.
class Assembler {
 public:
  Assembler(const IBVP& p, const Grid& g, NormalStencil stencil) : p_(p), g_(g), stencil_(stencil) {
    const double sigma = g.gamma.sigma_d();
    sigma_ = sigma;
    hy_ = 1.0 / g.K;
    hx_ = g.dims == 2 ? 2.0 / g.tangential : 1.0;
    if (stencil == NormalStencil::fitted) {
      const double gam = g.gamma.value_d();
      auto phi = [&](double x) {
        if (x == 0) return 0.0;
        if (g.gamma.is_log_case()) return x * std::log(x);
        return std::pow(x, 2 - gam) / ((2 - gam) * (1 - gam));
      };
      wm_.assign(static_cast<std::size_t>(g.K + 1), 0.0);
      w0_ = wp_ = wm_;
      for (int k = 1; k < g.K; ++k) {
        const double xm = g.xn(k - 1), x0 = g.xn(k), xp = g.xn(k + 1);
        const double ratio = (xp - x0) / (x0 - xm);
        const double D = (phi(xp) - phi(x0)) + ratio * (phi(xm) - phi(x0));
        const double wp = 1.0 / D;
        const double wm = wp * ratio;
        wp_[static_cast<std::size_t>(k)] = wp;
        wm_[static_cast<std::size_t>(k)] = wm;
        w0_[static_cast<std::size_t>(k)] = -(wp + wm);
      }
    }
  }

  bool interior(int k, int j) const { return k > 0 && k < g_.K && (g_.dims == 1 || (j > 0 && j < g_.tangential)); }

  /// Row of A at interior node (k, j) at time t.
  void row(int k, int j, double t, std::vector<Entry>& out) const {
    out.clear();
    const Point X = g_.point(k, j, t);
    const DegenerateOperator& L = p_.op;
    const std::size_t nn = L.n() - 1;
    const double ann = L.a(nn, nn)(X);
    const double bn = L.b(nn)(X);
    const double c = L.c()(X);
    const double h2 = hy_ * hy_;
    double lo = 0, di = c, up = 0;
    double beta = sigma_ * bn;
    if (stencil_ == NormalStencil::y_chart) {
      const double d = sigma_ * sigma_ * ann;
      const double y = g_.y(k);
      beta += sigma_ * (sigma_ - 1) * ann / y;
      lo += d / h2;
      up += d / h2;
      di -= 2 * d / h2;
    } else {
      lo += ann * wm_[static_cast<std::size_t>(k)];
      di += ann * w0_[static_cast<std::size_t>(k)];
      up += ann * wp_[static_cast<std::size_t>(k)];
    }
    if (beta > 0) {
      up += beta / hy_;
      di -= beta / hy_;
    } else {
      lo -= beta / hy_;
      di += beta / hy_;
    }
    out.push_back({g_.index(k - 1, j), lo});
    out.push_back({g_.index(k + 1, j), up});

    if (g_.dims == 2) {
      const double a11 = L.a(0, 0)(X);
      const double b1 = L.b(0)(X);
      const double m = 2 * sigma_ * L.a(0, nn)(X);
      const double hx2 = hx_ * hx_;
      out.push_back({g_.index(k, j - 1), a11 / hx2 - b1 / (2 * hx_)});
      out.push_back({g_.index(k, j + 1), a11 / hx2 + b1 / (2 * hx_)});
      di -= 2 * a11 / hx2;
      if (m != 0) {
        const double w = std::abs(m) / (2 * hx_ * hy_);
        // Axis neighbours lose w, the diagonal pair along the sign of m gains w, the centre gains 2w.
        out.push_back({g_.index(k, j + 1), -w});
        out.push_back({g_.index(k, j - 1), -w});
        out.push_back({g_.index(k + 1, j), -w});
        out.push_back({g_.index(k - 1, j), -w});
        if (m > 0) {
          out.push_back({g_.index(k + 1, j + 1), w});
          out.push_back({g_.index(k - 1, j - 1), w});
        } else {
          out.push_back({g_.index(k - 1, j + 1), w});
          out.push_back({g_.index(k + 1, j - 1), w});
        }
        di += 2 * w;
      }
    }
    out.push_back({g_.index(k, j), di});
    merge(out);
  }

 private:
  static void merge(std::vector<Entry>& row) {
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].col == row[r].col) row[w - 1].value += row[r].value;
      else row[w++] = row[r];
    }
    row.resize(w);
  }

  const IBVP& p_;
  const Grid& g_;
  NormalStencil stencil_;
  double sigma_ = 1.0;
  double hy_ = 1.0;
  double hx_ = 1.0;
  std::vector<double> wm_, w0_, wp_;
};

/// Spatial operator of all interior rows at one time level.
struct SpatialOperator {
  std::vector<std::vector<Entry>> rows;  ///< indexed by node; empty for boundary nodes
};

SpatialOperator assemble(const Assembler& as, const Grid& g, double t) {
  SpatialOperator op;
  op.rows.resize(g.node_count());
  std::vector<Entry> buf;
  for (int j = 0; j < g.tangential_nodes(); ++j)
    for (int k = 0; k <= g.K; ++k) {
      if (!as.interior(k, j)) continue;
      as.row(k, j, t, buf);
      op.rows[g.index(k, j)] = buf;
    }
  return op;
}

/// Sign pattern of I - theta dt A: positive diagonal, nonpositive off-diagonals, nonnegative row sums.
std::string m_matrix_violation(const SpatialOperator& A, double theta_dt, std::size_t node_count) {
  const double tol = 1e-12;
  for (std::size_t i = 0; i < node_count; ++i) {
    const auto& row = A.rows[i];
    if (row.empty()) continue;
    double sum = 1.0;
    for (const auto& e : row) {
      const double m = (e.col == i ? 1.0 : 0.0) - theta_dt * e.value;
      sum -= theta_dt * e.value;
      if (e.col == i && !(m > 0)) return "nonpositive diagonal at node " + std::to_string(i);
      if (e.col != i && m > tol * (1.0 + theta_dt * std::abs(e.value)))
        return "positive off-diagonal at node " + std::to_string(i);
    }
    if (sum < -tol * (1.0 + theta_dt)) return "negative row sum at node " + std::to_string(i);
  }
  return {};
}

}  // namespace

DiscreteSolution solve_ibvp(const IBVP& p, const Grid& grid, Scheme scheme, const SolverOptions& options) {
  grid.validate();
  if (!(p.op.gamma() == grid.gamma)) throw IncompatibleError("grid and operator have different gamma");
  if (static_cast<int>(p.op.n()) != grid.dims) throw IncompatibleError("grid and operator dimensions differ");
  if (!p.f || !p.g0 || !p.g) throw std::invalid_argument("problem data must be set");
  if (options.store_every < 1) throw std::invalid_argument("store_every must be positive");

  const double theta = scheme == Scheme::implicit_euler ? 1.0 : 0.5;
  const double dt = grid.dt();
  const std::size_t nodes = grid.node_count();
  const bool frozen = options.time_independent_coefficients || (p.op.is_symbolic() && !operator_depends_on_time(p.op));
  Assembler as(p, grid, options.stencil);

  DiscreteSolution sol(grid, scheme, options.stencil);
  MMatrixReport mrep;

  auto boundary_value = [&](int k, int j, double t) {
    const double v = p.g(grid.point(k, j, t));
    if (k == 0 && std::abs(v) > 1e-14)
      throw std::invalid_argument("boundary data must vanish on x_n = 0");
    return v;
  };
  auto forcing = [&](double t) {
    std::vector<double> f(nodes, 0.0);
    for (int j = 0; j < grid.tangential_nodes(); ++j)
      for (int k = 0; k <= grid.K; ++k)
        if (as.interior(k, j)) f[grid.index(k, j)] = p.f(grid.point(k, j, t));
    return f;
  };

  std::vector<double> u(nodes, 0.0);
  for (int j = 0; j < grid.tangential_nodes(); ++j)
    for (int k = 0; k <= grid.K; ++k)
      u[grid.index(k, j)] = as.interior(k, j) ? p.g0(grid.point(k, j, 0.0)) : boundary_value(k, j, 0.0);
  sol.push_level(0.0, u);

  SpatialOperator A_old = assemble(as, grid, 0.0);
  std::vector<double> f_old = forcing(0.0);

  // Dims = 2 linear algebra state.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_ready = false;
  bool factor_ready = false;

  for (int s = 1; s <= grid.steps; ++s) {
    const double t = grid.time(s);
    SpatialOperator A_new = frozen ? A_old : assemble(as, grid, t);
    const std::vector<double> f_new = forcing(t);

    if (options.check_m_matrix) {
      ++mrep.checked_steps;
      if (mrep.ok) {
        const std::string why = m_matrix_violation(A_new, theta * dt, nodes);
        if (!why.empty()) {
          mrep.ok = false;
          mrep.first_bad_step = s;
          mrep.detail = why;
        }
      }
    }

    // Right-hand side: u + (1 - theta) dt (A_old u + f_old) + theta dt f_new on interior rows.
    std::vector<double> rhs(nodes, 0.0);
    for (std::size_t i = 0; i < nodes; ++i) {
      if (A_new.rows[i].empty()) continue;
      double v = u[i] + theta * dt * f_new[i];
      if (theta < 1.0) {
        double Au = 0.0;
        for (const auto& e : A_old.rows[i]) Au += e.value * u[e.col];
        v += (1 - theta) * dt * (Au + f_old[i]);
      }
      rhs[i] = v;
    }
    std::vector<double> next(nodes, 0.0);
    for (int j = 0; j < grid.tangential_nodes(); ++j)
      for (int k = 0; k <= grid.K; ++k)
        if (!as.interior(k, j)) next[grid.index(k, j)] = boundary_value(k, j, t);

    if (grid.dims == 1) {
      const int n = grid.K - 1;
      std::vector<double> sub(static_cast<std::size_t>(n - 1)), diag(static_cast<std::size_t>(n)),
          sup(static_cast<std::size_t>(n - 1)), b(static_cast<std::size_t>(n));
      for (int k = 1; k < grid.K; ++k) {
        const std::size_t r = static_cast<std::size_t>(k - 1);
        b[r] = rhs[static_cast<std::size_t>(k)];
        for (const auto& e : A_new.rows[static_cast<std::size_t>(k)]) {
          const double m = (e.col == static_cast<std::size_t>(k) ? 1.0 : 0.0) - theta * dt * e.value;
          const int col = static_cast<int>(e.col);
          if (col == k) diag[r] = m;
          else if (col == 0 || col == grid.K) b[r] -= m * next[e.col];
          else if (col == k - 1) sub[r - 1] = m;
          else sup[r] = m;
        }
      }
      const auto x = thomas_solve(sub, diag, sup, std::move(b));
      for (int k = 1; k < grid.K; ++k) next[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k - 1)];
    } else {
      Eigen::VectorXd b(static_cast<Eigen::Index>(nodes));
      if (!factor_ready || !frozen) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nodes * 9);
        for (std::size_t i = 0; i < nodes; ++i) {
          if (A_new.rows[i].empty()) {
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
            continue;
          }
          for (const auto& e : A_new.rows[i])
            trip.emplace_back(static_cast<int>(i), static_cast<int>(e.col),
                              (e.col == i ? 1.0 : 0.0) - theta * dt * e.value);
        }
        Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(nodes));
        M.setFromTriplets(trip.begin(), trip.end());
        M.makeCompressed();
        if (!pattern_ready) {
          lu.analyzePattern(M);
          pattern_ready = true;
        }
        lu.factorize(M);
        if (lu.info() != Eigen::Success) throw BlowUpError(static_cast<std::size_t>(s), "sparse factorization failed");
        factor_ready = true;
      }
      for (std::size_t i = 0; i < nodes; ++i)
        b[static_cast<Eigen::Index>(i)] = A_new.rows[i].empty() ? next[i] : rhs[i];
      const Eigen::VectorXd x = lu.solve(b);
      for (std::size_t i = 0; i < nodes; ++i) next[i] = x[static_cast<Eigen::Index>(i)];
    }

    for (double v : next)
      if (!std::isfinite(v)) throw BlowUpError(static_cast<std::size_t>(s), "non-finite value");
    u = std::move(next);
    if (s % options.store_every == 0 || s == grid.steps) sol.push_level(t, u);
    if (!frozen) A_old = std::move(A_new);
    f_old = f_new;
  }
  sol.set_m_matrix(mrep);
  return sol;
}

MaxPrincipleReport check_discrete_max_principle(const DiscreteSolution& sol, const IBVP& p) {
  const Grid& g = sol.grid();
  MaxPrincipleReport rep;
  for (int s = 0; s <= g.steps; ++s) {
    const double t = g.time(s);
    for (int j = 0; j < g.tangential_nodes(); ++j)
      for (int k = 0; k <= g.K; ++k) {
        const Point X = g.point(k, j, t);
        const bool boundary = k == 0 || k == g.K || (g.dims == 2 && (j == 0 || j == g.tangential));
        if (boundary) rep.g_sup = std::max(rep.g_sup, std::abs(p.g(X)));
        else rep.f_sup = std::max(rep.f_sup, std::abs(p.f(X)));
        if (s == 0 && !boundary) rep.g_sup = std::max(rep.g_sup, std::abs(p.g0(X)));
      }
  }
  rep.max_abs_u = sol.max_abs();
  rep.bound = std::exp(1.0) * (rep.f_sup + rep.g_sup);
  rep.ok = rep.max_abs_u <= rep.bound * (1 + 1e-12) + 1e-14;
  return rep;
}

}  // namespace schauder
