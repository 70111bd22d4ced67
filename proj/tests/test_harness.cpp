#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dopt/harness.hpp"

using namespace dopt;
namespace fs = std::filesystem;

namespace {

RunConfig small_qp_config(const std::string& name, const std::string& dir) {
  RunConfig c;
  c.name = name;
  c.problem_generator = "qp";
  c.problem_seed = 11;
  c.problem_params = {{"N", 5}, {"d", 3}, {"eig_lo", 1.0}, {"eig_hi", 5.0}};
  c.graph_seed = 12;
  c.graph_params = {{"p", 0.5}};
  c.algorithm = "gt";
  c.rounds = 200;
  c.schedule = StepSchedule::constant(0.01);
  c.out_dir = dir;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "dopt-harness-tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config JSON round-trips through parse and emit") {
  const RunConfig c = small_qp_config("round-trip", ".");
  const nlohmann::json j = c.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.problem_generator == "qp");
  CHECK(back.rounds == 200);
}

TEST_CASE("unknown configuration keys are rejected") {
  nlohmann::json j = small_qp_config("bad", ".").to_json();
  j["typo_field"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  nlohmann::json j2 = small_qp_config("bad2", ".").to_json();
  j2["problem"]["extra"] = true;
  CHECK_THROWS_AS(RunConfig::from_json(j2), ConfigError);
}

TEST_CASE("algorithm and problem families must match") {
  RunConfig c = small_qp_config("mismatch", ".");
  c.algorithm = "dual-subgradient";  // needs a constraint-coupled problem
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.algorithm = "cc-lp";  // needs random-lp
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.algorithm = "nonsense";
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small_qp_config("ok", ".");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("unsupported schema versions are rejected") {
  nlohmann::json j = small_qp_config("schema", ".").to_json();
  j["schema_version"] = 2;
  CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("experiments are deterministic byte for byte") {
  const fs::path dir = scratch_dir();
  const RunConfig c = small_qp_config("determinism", dir.string());
  const ExperimentResult r1 = run_experiment(c);
  const ExperimentResult r2 = run_experiment(c);
  emit_trace(r1.trace, (dir / "det-a").string());
  emit_trace(r2.trace, (dir / "det-b").string());
  CHECK(slurp(dir / "det-a.csv") == slurp(dir / "det-b.csv"));
  CHECK(slurp(dir / "det-a.summary.csv") == slurp(dir / "det-b.summary.csv"));
  CHECK(r1.trace.oracle_hash == r2.trace.oracle_hash);
  CHECK(r1.trace.oracle_hash != 0);
}

TEST_CASE("a zero-round run emits a header-only trace") {
  const fs::path dir = scratch_dir();
  RunConfig c = small_qp_config("empty", dir.string());
  c.rounds = 0;
  const ExperimentResult r = run_experiment(c);
  emit_trace(r.trace, (dir / "empty").string());
  const std::string text = slurp(dir / "empty.csv");
  CHECK(text.rfind("# oracle_hash=", 0) == 0);
  // Comment line, header line, then nothing but the initial-round rows the
  // algorithm chooses to log (at most one).
  const long lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines <= 3);
}

TEST_CASE("traces survive the CSV round trip exactly") {
  const fs::path dir = scratch_dir();
  const RunConfig c = small_qp_config("csv-round-trip", dir.string());
  const ExperimentResult r = run_experiment(c);
  emit_trace(r.trace, (dir / "rt").string());
  const MetricsTrace back = parse_trace_csv((dir / "rt.csv").string());
  REQUIRE(back.columns == r.trace.columns);
  REQUIRE(back.rows.size() == r.trace.rows.size());
  CHECK(back.oracle_hash == r.trace.oracle_hash);
  for (size_t i = 0; i < back.rows.size(); ++i)
    for (size_t k = 0; k < back.rows[i].size(); ++k)
      CHECK(back.rows[i][k] == r.trace.rows[i][k]);  // %.17g is lossless
  CHECK(summarize_trace(back) == summarize_trace(r.trace));
}

TEST_CASE("tail fit recovers a known geometric decay") {
  std::vector<double> t, y;
  for (int k = 0; k <= 400; ++k) {
    t.push_back(k);
    y.push_back(std::pow(10.0, -0.1 * k) * 3.0);
  }
  const auto [slope, r2] = tail_loglinear_fit(t, y);
  CHECK(slope == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(r2 > 0.999999);
}

TEST_CASE("tail fit degrades gracefully on unusable data") {
  const auto [slope, r2] = tail_loglinear_fit({0, 1}, {0.0, -1.0});
  CHECK(slope == 0.0);
  CHECK(r2 == 0.0);
}

TEST_CASE("generated exchange LPs are feasible and normalized") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const CCLinearProgram lp = make_random_cc_lp(8, 3, seed);
    CHECK(lp.A.rows() == 8);
    CHECK(lp.c.size() == 3);
    CHECK(lp.b.minCoeff() > 0.0);  // the origin is strictly feasible
    for (int r = 0; r < 8; ++r)
      CHECK(lp.A.row(r).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("every preset parses, validates and round-trips") {
  for (const std::string& name : preset_names()) {
    const std::vector<RunConfig> cfgs = preset_configs(name);
    CHECK(!cfgs.empty());
    for (const RunConfig& c : cfgs) {
      CHECK_NOTHROW(c.validate());
      CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    }
  }
  CHECK_THROWS_AS(preset_configs("no-such-preset"), ConfigError);
}

TEST_CASE("the CLI maps config problems to exit code 2") {
  const fs::path dir = scratch_dir();
  const fs::path good = dir / "good.json";
  {
    std::ofstream out(good);
    out << small_qp_config("cli-good", dir.string()).to_json().dump(2);
  }
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << "{\"schema_version\": 1}";
  }
  std::string good_path = good.string(), bad_path = bad.string();
  {
    std::vector<char*> argv = {const_cast<char*>("dopt"),
                               const_cast<char*>("validate"),
                               good_path.data()};
    CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == 0);
  }
  {
    std::vector<char*> argv = {const_cast<char*>("dopt"),
                               const_cast<char*>("validate"),
                               bad_path.data()};
    CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == 2);
  }
  {
    std::string missing = (dir / "missing.json").string();
    std::vector<char*> argv = {const_cast<char*>("dopt"),
                               const_cast<char*>("validate"),
                               missing.data()};
    CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == 2);
  }
}
