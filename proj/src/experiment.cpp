#include "schauder/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "schauder/builtins.hpp"
#include "schauder/errors.hpp"
#include "schauder/expansion.hpp"
#include "schauder/operator.hpp"
#include "schauder/spoly_json.hpp"
#include "schauder/svg.hpp"

namespace schauder {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const std::set<std::string> kKinds{"oracle-check", "expand", "solve", "fit", "maxprin", "growth"};
const std::set<std::string> kTopKeys{"kind",  "name", "gamma",    "seed",   "problem", "grid",  "scheme",
                                     "stencil", "refine", "store_every", "mode", "operator", "f", "u0",
                                     "kappa", "M",    "N",        "order",  "source",  "radii", "samples",
                                     "cube",  "tau",  "exponent", "levels", "assert"};
const std::set<std::string> kProblems{"model_1d", "homogeneous", "nonpositive", "zero", "cev_call", "random"};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

Rational rational_field(const json& v, const std::string& key) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) return Rational(v.get<double>());
  } catch (const std::exception& e) {
    fail("'" + key + "': " + e.what());
  }
  fail("'" + key + "' must be a rational \"p/q\" or a number");
}

int int_field(const json& v, const std::string& key, int lo, int hi) {
  if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) fail("'" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::string string_field(const json& v, const std::string& key, const std::set<std::string>& choices) {
  if (!v.is_string()) fail("'" + key + "' must be a string");
  const std::string s = v.get<std::string>();
  if (!choices.empty() && !choices.count(s)) fail("'" + key + "' has unsupported value '" + s + "'");
  return s;
}

bool bool_field(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail("'" + key + "' must be true or false");
  return v.get<bool>();
}

const std::set<std::string>& assertion_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"oracle-check", {"residual_zero"}},
      {"expand", {"residual_threshold"}},
      {"solve", {"max_error", "order_min", "m_matrix"}},
      {"fit", {"kappa_min", "kappa_max"}},
      {"maxprin", {"bound", "nonpositive", "m_matrix"}},
      {"growth", {"factor"}},
  };
  return keys.at(kind);
}

DegenerateOperator build_operator(const json& op, const Gamma& gamma) {
  reject_unknown(op, {"builtin", "constant", "symbolic", "lambda", "Lambda"}, "operator");
  const double lambda = op.value("lambda", 0.5), Lambda = op.value("Lambda", 2.0);
  try {
    if (op.contains("builtin")) {
      const std::string b = string_field(op["builtin"], "operator.builtin", {"model", "cev"});
      return b == "model" ? DegenerateOperator::model(gamma) : cev_operator(gamma);
    }
    if (op.contains("constant")) {
      const json& c = op["constant"];
      reject_unknown(c, {"A", "B", "C"}, "operator.constant");
      std::vector<std::vector<Rational>> A;
      for (const auto& row : c.at("A")) {
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_field(v, "operator.constant.A"));
        A.push_back(r);
      }
      std::vector<Rational> B;
      for (const auto& v : c.value("B", json::array())) B.push_back(rational_field(v, "operator.constant.B"));
      if (B.empty()) B.assign(A.size(), Rational(0));
      const Rational C = c.contains("C") ? rational_field(c["C"], "operator.constant.C") : Rational(0);
      return DegenerateOperator::constant(gamma, A, B, C, lambda, Lambda);
    }
    if (op.contains("symbolic")) {
      const json& s = op["symbolic"];
      reject_unknown(s, {"dims", "a", "b", "c"}, "operator.symbolic");
      const std::size_t n = static_cast<std::size_t>(s.value("dims", 1));
      if (n < 1 || n > 2) fail("operator.symbolic.dims must be 1 or 2");
      std::vector<std::vector<CoefficientSpec>> a(n, std::vector<CoefficientSpec>(n));
      const json& aj = s.at("a");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = spoly_from_json(aj.at(i).at(j), gamma, n - 1);
      std::vector<CoefficientSpec> b(n);
      if (s.contains("b"))
        for (std::size_t i = 0; i < n; ++i) b[i] = spoly_from_json(s["b"].at(i), gamma, n - 1);
      CoefficientSpec c;
      if (s.contains("c")) c = spoly_from_json(s["c"], gamma, n - 1);
      return DegenerateOperator(gamma, std::move(a), std::move(b), std::move(c), lambda, Lambda);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("operator: ") + e.what());
  }
  fail("operator needs one of builtin, constant or symbolic");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, kTopKeys, "config");
  ExperimentConfig c;
  if (!j.contains("kind")) fail("config needs a 'kind'");
  c.kind = string_field(j["kind"], "kind", kKinds);
  c.name = j.contains("name") ? string_field(j["name"], "name", {}) : c.kind;
  if (j.contains("gamma")) {
    const Rational g = rational_field(j["gamma"], "gamma");
    if (g > 1) fail("gamma must satisfy gamma <= 1, got " + to_string(g));
    c.gamma = Gamma(g);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (c.kind == "growth") c.problem = "homogeneous";
  if (c.kind == "maxprin") c.problem = "random";
  if (j.contains("problem")) c.problem = string_field(j["problem"], "problem", kProblems);

  c.grid.gamma = c.gamma;
  if (c.kind == "fit") {
    c.grid.K = 2048;
    c.grid.steps = 512;
    c.scheme = Scheme::crank_nicolson;
    c.stencil = NormalStencil::fitted;
    c.cube = CubeKind::standard;
  } else {
    c.grid.K = 512;
    c.grid.steps = 512;
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, {"dims", "K", "tangential", "steps", "T"}, "grid");
    if (g.contains("dims")) c.grid.dims = int_field(g["dims"], "grid.dims", 1, 2);
    if (g.contains("K")) c.grid.K = int_field(g["K"], "grid.K", 2, 1 << 20);
    if (g.contains("tangential")) c.grid.tangential = int_field(g["tangential"], "grid.tangential", 2, 1 << 14);
    if (g.contains("steps")) c.grid.steps = int_field(g["steps"], "grid.steps", 1, 1 << 24);
    if (g.contains("T")) {
      const Rational T = rational_field(g["T"], "grid.T");
      if (T <= 0 || T > 1) fail("grid.T must lie in (0, 1]");
      c.grid.T = T.get_d();
    }
  }
  if (j.contains("scheme"))
    c.scheme = string_field(j["scheme"], "scheme", {"implicit_euler", "crank_nicolson"}) == "implicit_euler"
                   ? Scheme::implicit_euler
                   : Scheme::crank_nicolson;
  if (j.contains("stencil"))
    c.stencil = string_field(j["stencil"], "stencil", {"y_chart", "fitted"}) == "y_chart" ? NormalStencil::y_chart
                                                                                       : NormalStencil::fitted;
  if (j.contains("refine")) c.refine = bool_field(j["refine"], "refine");
  if (j.contains("store_every")) c.store_every = int_field(j["store_every"], "store_every", 1, 1 << 24);

  if (j.contains("mode")) c.mode = string_field(j["mode"], "mode", {"particular", "interior", "hierarchy"});
  if (j.contains("operator")) c.op = j["operator"];
  if (j.contains("f")) c.forcing = j["f"];
  if (j.contains("u0")) c.u0 = j["u0"];
  if (j.contains("kappa")) c.kappa = rational_field(j["kappa"], "kappa");
  if (j.contains("M")) c.M = int_field(j["M"], "M", 0, 64);
  if (j.contains("N")) c.N = int_field(j["N"], "N", 0, 64);
  if (j.contains("order")) c.order = string_field(j["order"], "order", {"ascending", "random_topological"});

  if (j.contains("source")) c.source = string_field(j["source"], "source", {"oracle", "fd", "synthetic"});
  if (j.contains("radii")) {
    if (!j["radii"].is_array()) fail("'radii' must be an array");
    for (const auto& r : j["radii"]) c.radii.push_back(rational_field(r, "radii"));
  } else {
    for (int k = 2; k <= 7; ++k) c.radii.push_back(Rational(1, 1L << k));
  }
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    if (c.radii[i] <= 0 || c.radii[i] > Rational(1, 2)) fail("radii must lie in (0, 1/2]");
    if (i > 0 && c.radii[i] >= c.radii[i - 1]) fail("radii must be strictly decreasing");
  }
  if (j.contains("samples")) c.samples = int_field(j["samples"], "samples", 1, 1 << 22);
  if (j.contains("cube"))
    c.cube = string_field(j["cube"], "cube", {"intrinsic", "standard"}) == "intrinsic" ? CubeKind::intrinsic
                                                                                       : CubeKind::standard;
  if (c.kind == "fit" && c.source == "fd") c.tau = Rational(c.grid.T);
  if (j.contains("tau")) c.tau = rational_field(j["tau"], "tau");
  if (j.contains("exponent")) c.synthetic_exponent = rational_field(j["exponent"], "exponent");
  if (j.contains("levels")) {
    const json& l = j["levels"];
    reject_unknown(l, {"first", "last"}, "levels");
    if (l.contains("first")) c.level_first = int_field(l["first"], "levels.first", 1, 60);
    if (l.contains("last")) c.level_last = int_field(l["last"], "levels.last", 1, 60);
    if (c.level_first > c.level_last) fail("levels.first must not exceed levels.last");
  }
  if (j.contains("assert")) {
    c.assertions = j["assert"];
    reject_unknown(c.assertions, assertion_keys(c.kind), "assert");
  }

  // Everything that can be validated before compute.
  try {
    c.grid.validate();
    if (c.kind == "expand") {
      const DegenerateOperator L = build_operator(c.op, c.gamma);
      const std::size_t dims = L.n() - 1;
      if (!c.forcing.empty()) spoly_from_json(c.forcing, c.gamma, dims);
      if (!c.u0.empty()) spoly_from_json(c.u0, c.gamma, dims);
      if (c.mode == "particular") require_nonresonant_kappa(c.kappa, c.gamma);
    }
    if ((c.kind == "solve" || c.kind == "maxprin" || c.kind == "growth") && c.grid.dims == 2)
      fail("built-in problems are one-dimensional; use grid.dims = 1");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = c.kind;
  j["name"] = c.name;
  j["gamma"] = to_string(c.gamma.value());
  j["seed"] = c.seed;
  j["problem"] = c.problem;
  j["grid"] = {{"dims", c.grid.dims},
               {"K", c.grid.K},
               {"tangential", c.grid.tangential},
               {"steps", c.grid.steps},
               {"T", to_string(Rational(c.grid.T))}};
  j["scheme"] = to_string(c.scheme);
  j["stencil"] = to_string(c.stencil);
  j["refine"] = c.refine;
  j["store_every"] = c.store_every;
  j["mode"] = c.mode;
  j["operator"] = c.op;
  j["f"] = c.forcing;
  j["u0"] = c.u0;
  j["kappa"] = to_string(c.kappa);
  j["M"] = c.M;
  j["N"] = c.N;
  j["order"] = c.order;
  j["source"] = c.source;
  json radii = json::array();
  for (const auto& r : c.radii) radii.push_back(to_string(r));
  j["radii"] = radii;
  j["samples"] = c.samples;
  j["cube"] = c.cube == CubeKind::intrinsic ? "intrinsic" : "standard";
  j["tau"] = to_string(c.tau);
  j["exponent"] = to_string(c.synthetic_exponent);
  j["levels"] = {{"first", c.level_first}, {"last", c.level_last}};
  j["assert"] = c.assertions;
  return j;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

/// Smooth data with sup |f| = 1 and sup |g| = 1 on the lateral face, vanishing at x_n = 0.
IBVP random_problem(const Gamma& gamma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double k1 = 1 + 4 * u(rng), w1 = 1 + 3 * u(rng), p1 = 6.283185307179586 * u(rng);
  const double k2 = 1 + 4 * u(rng), w2 = 1 + 3 * u(rng), p2 = 6.283185307179586 * u(rng);
  Field f = [=](const Point& X) { return std::sin(k1 * X.xn + w1 * X.t + p1); };
  Field g = [=](const Point& X) { return X.xn * std::cos(k2 * X.xn + w2 * X.t + p2); };
  return IBVP{DegenerateOperator::model(gamma), f, g, g};
}

IBVP make_problem(const ExperimentConfig& c) {
  if (c.problem == "random") return random_problem(c.gamma, c.seed);
  return builtin_problem(c.problem, c.gamma);
}

std::string solution_csv(const DiscreteSolution& sol) {
  std::ostringstream os;
  const Grid& g = sol.grid();
  os << (g.dims == 2 ? "t,x1,xn,u\n" : "t,xn,u\n");
  const std::size_t last = sol.levels().size() - 1;
  const double t = sol.times()[last];
  for (int j = 0; j < g.tangential_nodes(); ++j)
    for (int k = 0; k <= g.K; ++k) {
      os << format_double(t) << ",";
      if (g.dims == 2) os << format_double(g.x1(j)) << ",";
      os << format_double(g.xn(k)) << "," << format_double(sol.node(last, k, j)) << "\n";
    }
  return os.str();
}

double oracle_error(const DiscreteSolution& sol, const Field& exact) {
  const Grid& g = sol.grid();
  double err = 0.0;
  for (std::size_t l = 0; l < sol.levels().size(); ++l)
    for (int j = 0; j < g.tangential_nodes(); ++j)
      for (int k = 0; k <= g.K; ++k)
        err = std::max(err, std::abs(sol.node(l, k, j) - exact(g.point(k, j, sol.times()[l]))));
  return err;
}

class Assertions {
 public:
  void check(const std::string& name, bool passed, const std::string& detail) { list_.push_back({name, passed, detail}); }
  const std::vector<AssertionResult>& list() const { return list_; }
  bool all_passed() const {
    for (const auto& a : list_)
      if (!a.passed) return false;
    return true;
  }

 private:
  std::vector<AssertionResult> list_;
};

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.stencil = c.stencil;
  o.store_every = c.store_every;
  return o;
}

json run_oracle_check(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  const SPoly u = model_oracle(c.gamma);
  const SPoly f = SPoly::constant(c.gamma, 0, Rational(1));
  const SPoly R = residual(DegenerateOperator::model(c.gamma), u, f);
  json r;
  r["oracle"] = spoly_to_json(u);
  r["oracle_display"] = to_display_string(u);
  r["residual"] = R.empty() ? json("exactly zero") : spoly_to_json(R);
  if (c.assertions.value("residual_zero", true)) as.check("residual_zero", R.empty(), R.empty() ? "empty" : to_display_string(R));
  if (!out.empty()) {
    std::ostringstream os;
    os << "e,log,t,coeff\n";
    for (const auto& [key, coeff] : u.terms())
      os << to_string(key.e) << "," << key.logpow << "," << key.l << "," << to_string(coeff) << "\n";
    write_text(out / "oracle_terms.csv", os.str());
  }
  return r;
}

json expansion_json(const Expansion& E) {
  json terms = json::array();
  for (const auto& t : E.terms())
    terms.push_back({{"e", to_string(t.e)}, {"log", t.logpow}, {"coefficient", spoly_to_json(t.coef)}});
  return terms;
}

json run_expand(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  const DegenerateOperator L = build_operator(c.op, c.gamma);
  const std::size_t dims = L.n() - 1;
  EngineOptions opts;
  opts.order = c.order == "ascending" ? EngineOptions::Order::ascending : EngineOptions::Order::random_topological;
  opts.seed = c.seed;
  const SPoly one = SPoly::constant(c.gamma, dims, Rational(1));
  json r;
  Expansion E(c.gamma, dims);
  SPoly R(c.gamma, dims);
  Rational threshold;
  if (c.mode == "particular") {
    const SPoly f = c.forcing.empty() ? one : spoly_from_json(c.forcing, c.gamma, dims);
    const Construction k = construct_particular_solution(L, Expansion::from_spoly(f), c.kappa, opts);
    E = k.expansion;
    R = k.residual;
    threshold = k.threshold;
  } else if (c.mode == "interior") {
    const SPoly U0 = c.u0.empty() ? one : spoly_from_json(c.u0, c.gamma, dims);
    const Construction k = construct_interior_expansion(L, U0, c.M, c.N, opts);
    E = k.expansion;
    R = k.residual;
    threshold = k.threshold;
  } else {
    const SPoly U0 = c.u0.empty() ? one : spoly_from_json(c.u0, c.gamma, dims);
    E = homogeneous_hierarchy(L, U0, c.N);
    R = residual(L, E.flatten(), SPoly(c.gamma, dims));
    threshold = 1 + c.gamma.sigma() * (c.N - 1);
  }
  const auto me = R.min_exponent();
  r["expansion"] = expansion_json(E);
  r["residual_min_exponent"] = me ? json(to_string(*me)) : json(nullptr);
  r["threshold"] = to_string(threshold);
  r["residual_terms"] = R.size();
  if (c.assertions.value("residual_threshold", true))
    as.check("residual_threshold", !me || *me >= threshold,
             "min exponent " + (me ? to_string(*me) : std::string("none")) + " vs " + to_string(threshold));
  if (!out.empty()) {
    std::ostringstream os;
    os << "e,log,coefficient\n";
    for (const auto& t : E.terms()) os << to_string(t.e) << "," << t.logpow << ",\"" << to_display_string(t.coef) << "\"\n";
    write_text(out / "expansion.csv", os.str());
  }
  return r;
}

json run_solve(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  const IBVP p = make_problem(c);
  const DiscreteSolution sol = solve_ibvp(p, c.grid, c.scheme, solver_options(c));
  json r;
  r["max_abs_u"] = sol.max_abs();
  r["m_matrix"] = {{"ok", sol.m_matrix().ok}, {"checked_steps", sol.m_matrix().checked_steps}, {"detail", sol.m_matrix().detail}};
  r["stored_levels"] = sol.levels().size();
  if (c.assertions.value("m_matrix", false)) as.check("m_matrix", sol.m_matrix().ok, sol.m_matrix().detail);
  if (builtin_has_oracle(c.problem)) {
    const Field exact = builtin_oracle(c.problem, c.gamma);
    const double e1 = oracle_error(sol, exact);
    r["linf_error"] = e1;
    if (c.assertions.contains("max_error")) {
      const double tol = c.assertions["max_error"].get<double>();
      as.check("max_error", e1 <= tol, format_double(e1) + " <= " + format_double(tol));
    }
    if (c.refine) {
      Grid fine = c.grid;
      fine.K *= 2;
      fine.steps *= 4;
      const double e2 = oracle_error(solve_ibvp(p, fine, c.scheme, solver_options(c)), exact);
      const double order = std::log2(e1 / e2);
      r["refined"] = {{"K", fine.K}, {"steps", fine.steps}, {"linf_error", e2}, {"order", order}};
      if (c.assertions.contains("order_min")) {
        const double lo = c.assertions["order_min"].get<double>();
        as.check("order_min", order >= lo, format_double(order) + " >= " + format_double(lo));
      }
      if (!out.empty()) {
        std::ostringstream os;
        os << "K,steps,linf_error\n"
           << c.grid.K << "," << c.grid.steps << "," << format_double(e1) << "\n"
           << fine.K << "," << fine.steps << "," << format_double(e2) << "\n";
        write_text(out / "refinement.csv", os.str());
      }
    } else if (c.assertions.contains("order_min")) {
      as.check("order_min", false, "order_min needs refine = true");
    }
  } else if (c.assertions.contains("max_error") || c.assertions.contains("order_min")) {
    as.check("oracle", false, "problem '" + c.problem + "' has no closed-form solution");
  }
  if (!out.empty()) write_text(out / "solution.csv", solution_csv(sol));
  return r;
}

json deviation_rows_json(const FitReport& fit) {
  json rows = json::array();
  for (const auto& row : fit.rows) rows.push_back({{"r", row.r}, {"sup_deviation", row.sup}});
  return rows;
}

json run_fit(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  std::vector<double> radii;
  for (const auto& r : c.radii) radii.push_back(r.get_d());
  std::vector<DeviationRow> rows;
  json r;
  if (c.source == "synthetic") {
    const double p = c.synthetic_exponent.get_d();
    for (double rad : radii) rows.push_back({rad, std::pow(rad, p), Point{}});
  } else {
    const Evaluable p = as_evaluable(model_three_term(c.gamma));
    const Point center{{}, 0.0, c.tau.get_d()};
    if (c.source == "oracle") {
      DeviationOptions opts;
      opts.samples = c.samples;
      opts.seed = c.seed;
      opts.cube = c.cube;
      rows = sup_deviation(model_oracle_field(c.gamma), p, center, radii, c.gamma, opts);
    } else {
      const DiscreteSolution sol = solve_ibvp(builtin_problem("model_1d", c.gamma), c.grid, c.scheme, solver_options(c));
      r["m_matrix_ok"] = sol.m_matrix().ok;
      rows = sup_deviation_nodes(sol, p, center, radii, c.gamma, c.cube);
    }
  }
  const FitReport fit = fit_exponent(rows);
  r["rows"] = deviation_rows_json(fit);
  r["exact_fit"] = fit.exact;
  r["kappa_hat"] = fit.kappa_hat ? json(*fit.kappa_hat) : json(nullptr);
  r["C_hat"] = fit.C_hat;
  r["r2"] = fit.r2;
  const bool lo = c.assertions.contains("kappa_min"), hi = c.assertions.contains("kappa_max");
  if (lo || hi) {
    const double k = fit.kappa_hat.value_or(NAN);
    const double kmin = lo ? c.assertions["kappa_min"].get<double>() : -INFINITY;
    const double kmax = hi ? c.assertions["kappa_max"].get<double>() : INFINITY;
    as.check("kappa_range", fit.kappa_hat && k >= kmin && k <= kmax,
             "kappa_hat " + format_double(k) + " in [" + format_double(kmin) + ", " + format_double(kmax) + "]");
  }
  if (!out.empty()) {
    std::ostringstream os;
    os << "r,sup_deviation\n";
    for (const auto& row : rows) os << format_double(row.r) << "," << format_double(row.sup) << "\n";
    write_text(out / "deviation.csv", os.str());
    Series s{"sup |u - p|", {}, {}};
    for (const auto& row : rows) {
      s.x.push_back(row.r);
      s.y.push_back(row.sup);
    }
    write_text(out / "deviation.svg", render_svg({"sup deviation over cubes", "r", "sup |u - p|", true, true}, {s}));
  }
  return r;
}

json run_maxprin(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  const IBVP p = make_problem(c);
  const DiscreteSolution sol = solve_ibvp(p, c.grid, c.scheme, solver_options(c));
  const MaxPrincipleReport mp = check_discrete_max_principle(sol, p);
  double max_u = -INFINITY;
  for (const auto& lvl : sol.levels())
    for (double v : lvl) max_u = std::max(max_u, v);
  json r;
  r["max_abs_u"] = mp.max_abs_u;
  r["max_u"] = max_u;
  r["f_sup"] = mp.f_sup;
  r["g_sup"] = mp.g_sup;
  r["bound"] = mp.bound;
  r["m_matrix"] = {{"ok", sol.m_matrix().ok}, {"checked_steps", sol.m_matrix().checked_steps}, {"detail", sol.m_matrix().detail}};
  if (c.assertions.value("bound", true))
    as.check("bound", mp.ok, format_double(mp.max_abs_u) + " <= " + format_double(mp.bound));
  if (c.assertions.value("m_matrix", true)) as.check("m_matrix", sol.m_matrix().ok, sol.m_matrix().detail);
  if (c.assertions.value("nonpositive", c.problem == "nonpositive"))
    as.check("nonpositive", max_u <= 1e-12, "max u = " + format_double(max_u));
  if (!out.empty()) write_text(out / "solution.csv", solution_csv(sol));
  return r;
}

json run_growth(const ExperimentConfig& c, Assertions& as, const std::filesystem::path& out) {
  const IBVP p = make_problem(c);
  const DiscreteSolution sol = solve_ibvp(p, c.grid, c.scheme, solver_options(c));
  std::vector<double> levels;
  for (int j = c.level_first; j <= c.level_last; ++j) levels.push_back(std::pow(2.0, -j / c.gamma.sigma_d()));
  GrowthOptions opts;
  opts.times = {c.grid.T};
  opts.seed = c.seed;
  const auto rows = boundary_growth_ratio(as_evaluable(sol), c.gamma, levels, opts);
  json r;
  r["gauge"] = c.gamma.is_log_case() ? "-x_n log x_n" : "x_n";
  json table = json::array();
  for (const auto& row : rows) table.push_back({{"xn", row.xn}, {"ratio", row.ratio}});
  r["rows"] = table;
  const double factor = c.assertions.value("factor", 2.0);
  r["bounded"] = growth_bounded(rows, factor);
  as.check("growth_factor", growth_bounded(rows, factor),
           "finest " + format_double(rows.back().ratio) + " vs " + format_double(factor) + " x coarsest " +
               format_double(rows.front().ratio));
  if (!out.empty()) {
    std::ostringstream os;
    os << "xn,ratio\n";
    Series s{"max |u| / gauge", {}, {}};
    for (const auto& row : rows) {
      os << format_double(row.xn) << "," << format_double(row.ratio) << "\n";
      s.x.push_back(row.xn);
      s.y.push_back(row.ratio);
    }
    write_text(out / "growth.csv", os.str());
    write_text(out / "growth.svg", render_svg({"boundary growth", "x_n", "ratio", true, false}, {s}));
  }
  return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& out) {
  if (!out.empty()) std::filesystem::create_directories(out);
  Assertions as;
  json results;
  try {
    if (c.kind == "oracle-check") results = run_oracle_check(c, as, out);
    else if (c.kind == "expand") results = run_expand(c, as, out);
    else if (c.kind == "solve") results = run_solve(c, as, out);
    else if (c.kind == "fit") results = run_fit(c, as, out);
    else if (c.kind == "maxprin") results = run_maxprin(c, as, out);
    else if (c.kind == "growth") results = run_growth(c, as, out);
    else throw ConfigError("unknown experiment kind '" + c.kind + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    as.check("completed", false, e.what());
  }
  RunResult res;
  res.assertions = as.list();
  res.exit_code = as.all_passed() ? 0 : 1;
  json asserts = json::array(), failures = json::array();
  for (const auto& a : as.list()) {
    asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    if (!a.passed) failures.push_back({{"name", a.name}, {"detail", a.detail}});
  }
  res.report = {{"config", to_json(c)},
                {"results", results},
                {"assertions", asserts},
                {"failures", failures},
                {"status", res.exit_code == 0 ? "pass" : "fail"}};
  if (!out.empty()) write_text(out / "report.json", res.report.dump(2) + "\n");
  return res;
}

SuiteResult run_suite(const json& suite, const std::filesystem::path& out, int jobs,
                      std::optional<std::uint64_t> seed_override) {
  reject_unknown(suite, {"experiments"}, "suite");
  if (!suite.contains("experiments") || !suite["experiments"].is_array()) fail("suite needs an 'experiments' array");
  std::vector<ExperimentConfig> configs;
  std::set<std::string> names;
  for (const auto& entry : suite["experiments"]) {
    json e = entry;
    if (seed_override && e.is_object()) e["seed"] = *seed_override;
    ExperimentConfig c = parse_config(e);
    if (!names.insert(c.name).second) fail("duplicate experiment name '" + c.name + "'");
    configs.push_back(std::move(c));
  }
  std::vector<RunResult> results(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++)
      results[i] = run_experiment(configs[i], out.empty() ? out : out / configs[i].name);
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::future<void>> pool;
  for (int k = 0; k < n; ++k) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  SuiteResult sr;
  json entries = json::array();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    entries.push_back({{"name", configs[i].name}, {"status", results[i].report["status"]}, {"failures", results[i].report["failures"]}});
    if (results[i].exit_code != 0) sr.exit_code = 1;
  }
  sr.report = {{"experiments", entries}, {"status", sr.exit_code == 0 ? "pass" : "fail"}};
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    write_text(out / "report.json", sr.report.dump(2) + "\n");
  }
  return sr;
}

}  // namespace schauder
