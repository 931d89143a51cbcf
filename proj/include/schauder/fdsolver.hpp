#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "schauder/operator.hpp"

namespace schauder {

/// Mesh uniform in y = x_n^sigma on [0, 1], uniform in x_1 on [-1, 1] when dims = 2, uniform in t on [0, T].
struct Grid {
  Gamma gamma{Rational(0)};
  int dims = 1;
  int K = 64;
  int tangential = 16;
  int steps = 64;
  double T = 0.5;

  void validate() const;
  double y(int k) const { return static_cast<double>(k) / K; }
  double xn(int k) const;
  double x1(int j) const { return -1.0 + 2.0 * j / tangential; }
  double dt() const { return T / steps; }
  double time(int s) const { return T * s / steps; }
  int tangential_nodes() const { return dims == 2 ? tangential + 1 : 1; }
  std::size_t node_count() const { return static_cast<std::size_t>(K + 1) * static_cast<std::size_t>(tangential_nodes()); }
  std::size_t index(int k, int j = 0) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(k); }
  Point point(int k, int j, double t) const;
};

/// u_t = L u + f on the unit half-cube with u = g on the lateral faces and u = g0 at t = 0.
struct IBVP {
  DegenerateOperator op;
  Field f;
  Field g0;
  Field g;
};

enum class Scheme { implicit_euler, crank_nicolson };

/// y_chart: centered D_yy plus upwind drift. fitted: three-point weights exact on {1, x_n, phi}
/// with x_n^gamma phi'' = 1, applied to the x_n^gamma a^{nn} D_nn part.
enum class NormalStencil { y_chart, fitted };

struct SolverOptions {
  NormalStencil stencil = NormalStencil::y_chart;
  int store_every = 1;
  bool check_m_matrix = true;
  /// Evaluate coefficients once; detected automatically for symbolic operators without t.
  bool time_independent_coefficients = false;
};

struct MMatrixReport {
  bool ok = true;
  std::size_t checked_steps = 0;
  long first_bad_step = -1;
  std::string detail;
};

std::string to_string(Scheme s);
std::string to_string(NormalStencil s);

class DiscreteSolution {
 public:
  DiscreteSolution(Grid grid, Scheme scheme, NormalStencil stencil);

  const Grid& grid() const noexcept { return grid_; }
  Scheme scheme() const noexcept { return scheme_; }
  NormalStencil stencil() const noexcept { return stencil_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<std::vector<double>>& levels() const noexcept { return levels_; }
  const MMatrixReport& m_matrix() const noexcept { return mmatrix_; }

  double node(std::size_t level, int k, int j = 0) const { return levels_.at(level).at(grid_.index(k, j)); }
  /// Multilinear interpolation in (y, x_1, t). Throws DomainError outside the mesh.
  double value(const Point& x) const;
  double max_abs() const;

  void push_level(double t, std::vector<double> values);
  void set_m_matrix(MMatrixReport r) { mmatrix_ = std::move(r); }

 private:
  Grid grid_;
  Scheme scheme_;
  NormalStencil stencil_;
  std::vector<double> times_;
  std::vector<std::vector<double>> levels_;
  MMatrixReport mmatrix_;
};

/// Coefficients of L in the chart y = x_n^sigma, as fields of the physical point.
struct TransformedCoefficients {
  Rational sigma_squared;  ///< factor of a^{nn} D_yy
  Rational drift_factor;   ///< sigma (sigma - 1), factor of a^{nn} y^{-1} D_y
  Field diffusion_yy;      ///< sigma^2 a^{nn}
  Field drift_y;           ///< sigma (sigma - 1) a^{nn} / y + sigma b^n
  Field diffusion_11;      ///< a^{11} (dims = 2)
  Field mixed_1y;          ///< 2 sigma a^{1n}, coefficient of D_{1y}
  Field drift_1;           ///< b^1
  Field reaction;          ///< c
};

TransformedCoefficients transform_operator(const DegenerateOperator& L);

/// Throws BlowUpError on non-finite values and std::invalid_argument for g != 0 on x_n = 0.
DiscreteSolution solve_ibvp(const IBVP& p, const Grid& grid, Scheme scheme = Scheme::implicit_euler,
                            const SolverOptions& options = {});

struct MaxPrincipleReport {
  bool ok = true;
  double max_abs_u = 0.0;
  double f_sup = 0.0;
  double g_sup = 0.0;
  double bound = 0.0;  ///< e (f_sup + g_sup)
};

MaxPrincipleReport check_discrete_max_principle(const DiscreteSolution& sol, const IBVP& p);

}  // namespace schauder
