#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "schauder/builtins.hpp"
#include "schauder/experiment.hpp"

namespace fs = std::filesystem;
using namespace schauder;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

const fs::path kScratchRoot = fs::temp_directory_path() / ("schauder_cli_test_" + std::to_string(::getpid()));

struct ScratchCleanup {
  ~ScratchCleanup() {
    std::error_code ec;
    fs::remove_all(kScratchRoot, ec);
  }
} const kCleanup;

fs::path scratch(const std::string& name) {
  const fs::path dir = kScratchRoot / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = std::string(SCHAUDER_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("oracle-check reports an exactly zero residual") {
  const fs::path dir = scratch("oracle");
  const Run r = run("oracle-check --gamma 1/2 --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("residual: exactly zero") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
  CHECK(report["status"] == "pass");
}

TEST_CASE("fit with synthetic cubic data recovers 3") {
  const fs::path dir = scratch("synthetic");
  const auto cfg = write_config(dir, {{"kind", "fit"}, {"source", "synthetic"}, {"exponent", "3"},
                                      {"assert", {{"kappa_min", 2.999}, {"kappa_max", 3.001}}}});
  const Run r = run("fit --config " + cfg.string() + " --out " + (dir / "o").string(), dir);
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
  CHECK(std::abs(report["results"]["kappa_hat"].get<double>() - 3.0) < 1e-9);
}

TEST_CASE("configuration errors exit with 2") {
  const fs::path dir = scratch("errors");
  CHECK(run("solve --gamma 2 --out " + (dir / "a").string(), dir).code == 2);
  CHECK(run("solve --gamma abc --out " + (dir / "b").string(), dir).code == 2);
  CHECK(run("fit --bogus", dir).code == 2);
  const auto unknown = write_config(dir, {{"kind", "solve"}, {"unexpected", 1}});
  CHECK(run("solve --config " + unknown.string() + " --out " + (dir / "c").string(), dir).code == 2);
  const auto mismatch = write_config(dir, {{"kind", "fit"}});
  CHECK(run("solve --config " + mismatch.string() + " --out " + (dir / "d").string(), dir).code == 2);
  const auto resonant = write_config(dir, {{"kind", "expand"}, {"kappa", "3"}});
  CHECK(run("expand --config " + resonant.string() + " --out " + (dir / "e").string(), dir).code == 2);
}

TEST_CASE("failing assertions exit with 1 and list the failures") {
  const fs::path dir = scratch("failing");
  const auto cfg = write_config(dir, {{"kind", "fit"}, {"source", "synthetic"}, {"exponent", "2"},
                                      {"assert", {{"kappa_min", 3.5}, {"kappa_max", 4.5}}}});
  const Run r = run("fit --config " + cfg.string() + " --out " + (dir / "o").string(), dir);
  CHECK(r.code == 1);
  const auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
  CHECK(report["status"] == "fail");
  CHECK_FALSE(report["failures"].empty());
}

TEST_CASE("identical configurations give byte-identical artifacts") {
  const fs::path dir = scratch("determinism");
  const auto cfg = write_config(dir, {{"kind", "solve"},
                                      {"gamma", "1/2"},
                                      {"grid", {{"K", 64}, {"steps", 64}}},
                                      {"refine", true}});
  for (const char* out : {"a", "b"}) CHECK(run("solve --config " + cfg.string() + " --seed 7 --out " + (dir / out).string(), dir).code == 0);
  for (const char* file : {"report.json", "solution.csv", "refinement.csv"})
    CHECK(slurp(dir / "a" / file) == slurp(dir / "b" / file));

  const auto fit = write_config(dir, {{"kind", "fit"}, {"source", "oracle"}, {"samples", 256}});
  for (const char* out : {"c", "d"}) CHECK(run("fit --config " + fit.string() + " --seed 3 --out " + (dir / out).string(), dir).code == 0);
  for (const char* file : {"report.json", "deviation.csv"}) CHECK(slurp(dir / "c" / file) == slurp(dir / "d" / file));
}

TEST_CASE("a report can be fed back as a configuration") {
  const fs::path dir = scratch("replay");
  CHECK(run("growth --gamma 1/2 --out " + (dir / "a").string(), dir).code == 0);
  CHECK(run("growth --config " + (dir / "a" / "report.json").string() + " --out " + (dir / "b").string(), dir).code == 0);
  CHECK(slurp(dir / "a" / "growth.csv") == slurp(dir / "b" / "growth.csv"));
}

TEST_CASE("suite runs experiments in parallel with stable output") {
  const fs::path dir = scratch("suite");
  const nlohmann::json suite = {{"experiments",
                                 {{{"kind", "oracle-check"}, {"name", "oracle"}, {"gamma", "-1"}},
                                  {{"kind", "maxprin"}, {"name", "maxprin"}, {"grid", {{"K", 32}, {"steps", 32}}}},
                                  {{"kind", "expand"}, {"name", "expand"}, {"gamma", "1"}}}}};
  const fs::path p = dir / "suite.json";
  std::ofstream(p) << suite.dump();
  CHECK(run("suite --config " + p.string() + " --jobs 3 --out " + (dir / "a").string(), dir).code == 0);
  CHECK(run("suite --config " + p.string() + " --jobs 1 --out " + (dir / "b").string(), dir).code == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));

  const nlohmann::json dup = {{"experiments", {{{"kind", "oracle-check"}, {"name", "x"}}, {{"kind", "oracle-check"}, {"name", "x"}}}}};
  std::ofstream(dir / "dup.json") << dup.dump();
  CHECK(run("suite --config " + (dir / "dup.json").string() + " --out " + (dir / "c").string(), dir).code == 2);
}

TEST_CASE("list-builtins names the catalog entries") {
  const fs::path dir = scratch("builtins");
  const Run r = run("list-builtins", dir);
  CHECK(r.code == 0);
  for (const char* name : {"model_1d", "cev", "lip_phi"}) CHECK(r.out.find(name) != std::string::npos);
  bool has_cev = false;
  for (const auto& e : list_builtins()) has_cev = has_cev || e.name == "cev";
  CHECK(has_cev);
}

TEST_CASE("config parsing in process") {
  const auto c = parse_config(nlohmann::json{{"kind", "expand"}, {"gamma", "1/3"}, {"kappa", "9/2"}});
  CHECK(c.gamma.value() == Rational(1, 3));
  CHECK(parse_config(to_json(c)).kappa == c.kappa);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"kind", "nope"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json{{"kind", "fit"}, {"assert", {{"max_error", 1}}}}), ConfigError);
}
