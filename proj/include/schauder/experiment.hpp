#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "schauder/fdsolver.hpp"
#include "schauder/gamma.hpp"
#include "schauder/verify.hpp"

namespace schauder {

/// Parsed and validated experiment description. Every field has a default so that the
/// resolved form written back into reports is complete.
struct ExperimentConfig {
  std::string kind;  ///< oracle-check | expand | solve | fit | maxprin | growth
  std::string name;
  Gamma gamma{Rational(1, 2)};
  std::uint64_t seed = 1;

  std::string problem = "model_1d";
  Grid grid;
  Scheme scheme = Scheme::implicit_euler;
  NormalStencil stencil = NormalStencil::y_chart;
  bool refine = false;
  int store_every = 1;

  // expand
  std::string mode = "particular";  ///< particular | interior | hierarchy
  nlohmann::json op = {{"builtin", "model"}};
  nlohmann::json forcing = nlohmann::json::array();
  nlohmann::json u0 = nlohmann::json::array();
  Rational kappa{5, 2};
  int M = 1;
  int N = 3;
  std::string order = "ascending";

  // fit
  std::string source = "oracle";  ///< oracle | fd | synthetic
  std::vector<Rational> radii;
  int samples = 4096;
  CubeKind cube = CubeKind::intrinsic;
  Rational tau{0};
  Rational synthetic_exponent{3};

  // growth
  int level_first = 2;
  int level_last = 7;

  nlohmann::json assertions = nlohmann::json::object();
};

/// Throws ConfigError for unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

struct AssertionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  int exit_code = 0;  ///< 0 all assertions pass, 1 some assertion failed
  nlohmann::json report;
  std::vector<AssertionResult> assertions;
};

/// Runs one experiment and writes report.json, CSV and SVG files into `out` when it is non-empty.
RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& out);

struct SuiteResult {
  int exit_code = 0;
  nlohmann::json report;
};

/// Runs the experiments of {"experiments": [...]} with up to `jobs` in flight; each writes into
/// out/<name>. Throws ConfigError before any compute when an entry is invalid.
SuiteResult run_suite(const nlohmann::json& suite, const std::filesystem::path& out, int jobs,
                      std::optional<std::uint64_t> seed_override);

/// Fixed-precision text for CSV and reports.
std::string format_double(double v);

}  // namespace schauder
