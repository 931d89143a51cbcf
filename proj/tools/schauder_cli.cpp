#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "schauder/builtins.hpp"
#include "schauder/errors.hpp"
#include "schauder/experiment.hpp"

namespace {

using nlohmann::json;
using namespace schauder;

struct Flags {
  std::string gamma;
  std::string config;
  std::string out = "schauder_out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

/// A report's embedded config can be fed back in unchanged.
json unwrap_report(json j) {
  if (j.is_object() && !j.contains("kind") && j.contains("config")) return j["config"];
  return j;
}

int run_single(const std::string& kind, const Flags& f) {
  json j = f.config.empty() ? json::object() : unwrap_report(load_json(f.config));
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("kind") && j["kind"] != kind)
    throw ConfigError("config kind '" + j["kind"].dump() + "' does not match subcommand '" + kind + "'");
  j["kind"] = kind;
  if (!f.gamma.empty()) j["gamma"] = f.gamma;
  if (f.seed) j["seed"] = *f.seed;
  const ExperimentConfig c = parse_config(j);
  const RunResult r = run_experiment(c, f.out);
  if (kind == "oracle-check" && r.report["results"].contains("residual") && r.report["results"]["residual"].is_string())
    std::cout << "residual: " << r.report["results"]["residual"].get<std::string>() << "\n";
  for (const auto& a : r.assertions) std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
  std::cout << "status: " << r.report["status"].get<std::string>() << " (" << (std::filesystem::path(f.out) / "report.json").string()
            << ")\n";
  if (r.exit_code != 0) std::cerr << r.report["failures"].dump() << "\n";
  return r.exit_code;
}

int run_suite_cmd(const Flags& f) {
  if (f.config.empty()) throw ConfigError("suite needs --config");
  if (f.jobs < 1) throw ConfigError("--jobs must be positive");
  json j = load_json(f.config);
  if (!f.gamma.empty() && j.contains("experiments") && j["experiments"].is_array())
    for (auto& e : j["experiments"])
      if (e.is_object()) e["gamma"] = f.gamma;
  const SuiteResult r = run_suite(j, f.out, f.jobs, f.seed);
  for (const auto& e : r.report["experiments"])
    std::cout << (e["status"] == "pass" ? "PASS " : "FAIL ") << e["name"].get<std::string>() << "\n";
  std::cout << "status: " << r.report["status"].get<std::string>() << "\n";
  if (r.exit_code != 0) std::cerr << r.report["experiments"].dump() << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularity experiments for degenerate parabolic equations"};
  app.require_subcommand(1);
  Flags flags;
  const char* kinds[] = {"oracle-check", "expand", "solve", "fit", "maxprin", "growth"};
  for (const char* k : kinds) {
    auto* sub = app.add_subcommand(k, std::string("run an experiment of kind ") + k);
    sub->add_option("--gamma", flags.gamma, "gamma as p/q");
    sub->add_option("--config", flags.config, "experiment config (JSON)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--jobs", flags.jobs, "parallel jobs");
  }
  auto* suite = app.add_subcommand("suite", "run every experiment of a suite file");
  suite->add_option("--gamma", flags.gamma, "gamma override for every experiment");
  suite->add_option("--config", flags.config, "suite file {\"experiments\": [...]}")->required();
  suite->add_option("--out", flags.out, "output directory");
  suite->add_option("--seed", flags.seed, "seed override");
  suite->add_option("--jobs", flags.jobs, "experiments in flight");
  app.add_subcommand("list-builtins", "print the built-in problems and barriers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const std::string name = sub->get_name();
      if (name == "list-builtins") {
        for (const auto& b : list_builtins()) std::cout << b.name << "\t" << b.category << "\t" << b.description << "\n";
        return 0;
      }
      if (name == "suite") return run_suite_cmd(flags);
      return run_single(name, flags);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
