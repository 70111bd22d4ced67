#include "dopt/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "dopt/dual.hpp"
#include "dopt/localsolve.hpp"
#include "dopt/primal.hpp"
#include "dopt/rng.hpp"

namespace dopt {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object())
    throw ConfigError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

json schedule_to_json(const StepSchedule& s) {
  switch (s.kind) {
    case StepSchedule::Kind::Constant:
      return {{"kind", "constant"}, {"gamma", s.gamma}};
    case StepSchedule::Kind::Power:
      return {{"kind", "power"}, {"c", s.c}, {"eps", s.eps}};
    case StepSchedule::Kind::Harmonic:
      return {{"kind", "harmonic"}};
  }
  throw ConfigError("schedule: unknown kind");
}

StepSchedule schedule_from_json(const json& j) {
  check_keys(j, {"kind", "gamma", "c", "eps"}, "schedule");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    return StepSchedule::constant(j.at("gamma").get<double>());
  if (kind == "power")
    return StepSchedule::power(j.at("c").get<double>(), j.at("eps").get<double>());
  if (kind == "harmonic") return StepSchedule::harmonic();
  throw ConfigError("schedule: unknown kind '" + kind + "'");
}

double param(const json& p, const std::string& key, double fallback) {
  if (p.contains(key)) return p.at(key).get<double>();
  return fallback;
}

int iparam(const json& p, const std::string& key, int fallback) {
  if (p.contains(key)) return p.at(key).get<int>();
  return fallback;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j,
             {"schema_version", "name", "problem", "graph", "algorithm",
              "output"},
             "config");
  RunConfig c;
  c.schema_version = j.at("schema_version").get<int>();
  if (c.schema_version != 1)
    throw ConfigError("config: unsupported schema_version " +
                      std::to_string(c.schema_version));
  c.name = j.at("name").get<std::string>();

  const json& p = j.at("problem");
  check_keys(p, {"generator", "seed", "params"}, "problem");
  c.problem_generator = p.at("generator").get<std::string>();
  c.problem_seed = p.at("seed").get<std::uint64_t>();
  c.problem_params = p.value("params", json::object());

  const json& g = j.at("graph");
  check_keys(g, {"generator", "seed", "params"}, "graph");
  c.graph_generator = g.at("generator").get<std::string>();
  c.graph_seed = g.at("seed").get<std::uint64_t>();
  c.graph_params = g.value("params", json::object());

  const json& a = j.at("algorithm");
  check_keys(a, {"id", "rounds", "schedule", "rho", "M"}, "algorithm");
  c.algorithm = a.at("id").get<std::string>();
  c.rounds = a.at("rounds").get<long>();
  if (a.contains("schedule")) c.schedule = schedule_from_json(a.at("schedule"));
  c.rho = a.value("rho", 0.1);
  c.M = a.value("M", 0.0);

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"dir", "format"}, "output");
    c.out_dir = o.value("dir", ".");
    c.format = o.value("format", "csv");
  }
  c.validate();
  return c;
}

json RunConfig::to_json() const {
  return {{"schema_version", schema_version},
          {"name", name},
          {"problem",
           {{"generator", problem_generator},
            {"seed", problem_seed},
            {"params", problem_params}}},
          {"graph",
           {{"generator", graph_generator},
            {"seed", graph_seed},
            {"params", graph_params}}},
          {"algorithm",
           {{"id", algorithm},
            {"rounds", rounds},
            {"schedule", schedule_to_json(schedule)},
            {"rho", rho},
            {"M", M}}},
          {"output", {{"dir", out_dir}, {"format", format}}}};
}

void RunConfig::validate() const {
  if (name.empty()) throw ConfigError("config: name must not be empty");
  if (rounds < 0) throw ConfigError("config: rounds must be >= 0");
  if (format != "csv") throw ConfigError("config: only format 'csv' is supported");
  if (graph_generator != "erdos-renyi")
    throw ConfigError("config: unknown graph generator '" + graph_generator + "'");

  const bool cost_coupled = problem_generator == "logistic" ||
                            problem_generator == "lasso" ||
                            problem_generator == "qp";
  const bool constraint_coupled = problem_generator == "microgrid";
  const bool common_cost = problem_generator == "svm";
  const bool lp = problem_generator == "random-lp";
  if (!cost_coupled && !constraint_coupled && !common_cost && !lp)
    throw ConfigError("config: unknown problem generator '" + problem_generator + "'");

  const std::string& a = algorithm;
  const bool wants_cost = a == "dsg" || a == "gt" || a == "ddec" || a == "dadmm";
  const bool wants_coupled = a == "dual-subgradient" || a == "rsdd";
  if (wants_cost && !cost_coupled)
    throw ConfigError("config: algorithm '" + a + "' needs a cost-coupled problem");
  if (wants_coupled && !constraint_coupled)
    throw ConfigError("config: algorithm '" + a + "' needs a constraint-coupled problem");
  if (a == "cc-lp" && !lp)
    throw ConfigError("config: cc-lp needs problem generator random-lp");
  if (a == "cc-convex" && !common_cost)
    throw ConfigError("config: cc-convex needs a common-cost problem");
  if (!wants_cost && !wants_coupled && a != "cc-lp" && a != "cc-convex")
    throw ConfigError("config: unknown algorithm '" + a + "'");
}

std::vector<std::string> preset_names() {
  return {"ch2-logistic", "ch3-qp", "ch3-microgrid", "ch4-svm", "ch4-lp"};
}

std::vector<RunConfig> preset_configs(const std::string& name) {
  auto base = [&](const std::string& run_name) {
    RunConfig c;
    c.name = run_name;
    return c;
  };
  if (name == "ch2-logistic") {
    RunConfig dsg = base("ch2-logistic-dsg");
    dsg.problem_generator = "logistic";
    dsg.problem_seed = 1;
    dsg.problem_params = {{"N", 30}, {"m_i", 10}, {"d", 5}, {"C", 0.01}};
    dsg.graph_seed = 2;
    dsg.graph_params = {{"p", 0.2}, {"directed", false}};
    dsg.algorithm = "dsg";
    dsg.schedule = StepSchedule::power(1.0, 0.8);
    dsg.rounds = 20000;
    RunConfig gt = dsg;
    gt.name = "ch2-logistic-gt";
    gt.algorithm = "gt";
    gt.schedule = StepSchedule::constant(1e-3);
    return std::vector<RunConfig>{dsg, gt};
  }
  if (name == "ch3-qp") {
    RunConfig admm = base("ch3-qp-dadmm");
    admm.problem_generator = "qp";
    admm.problem_seed = 3;
    admm.problem_params = {{"N", 10}, {"d", 5}, {"eig_lo", 1.0}, {"eig_hi", 10.0}};
    admm.graph_seed = 4;
    admm.graph_params = {{"p", 0.2}, {"directed", false}};
    admm.algorithm = "dadmm";
    admm.rho = 0.1;
    admm.rounds = 5000;
    RunConfig ddec = admm;
    ddec.name = "ch3-qp-ddec";
    ddec.algorithm = "ddec";
    ddec.schedule = StepSchedule::power(1.0, 0.7);
    ddec.rounds = 200000;
    return std::vector<RunConfig>{admm, ddec};
  }
  if (name == "ch3-microgrid") {
    RunConfig rsdd = base("ch3-microgrid-rsdd");
    rsdd.problem_generator = "microgrid";
    rsdd.problem_seed = 5;
    rsdd.problem_params = json::object();
    rsdd.graph_seed = 6;
    rsdd.graph_params = {{"p", 0.6}, {"directed", false}};
    rsdd.algorithm = "rsdd";
    rsdd.schedule = StepSchedule::power(0.1, 0.7);
    rsdd.M = 0.0;  // derive 10 ||mu*||_1 from the oracle
    rsdd.rounds = 60000;
    RunConfig subgr = rsdd;
    subgr.name = "ch3-microgrid-subgradient";
    subgr.algorithm = "dual-subgradient";
    subgr.rounds = 20000;
    return std::vector<RunConfig>{rsdd, subgr};
  }
  if (name == "ch4-svm") {
    RunConfig cc = base("ch4-svm-cc");
    cc.problem_generator = "svm";
    cc.problem_seed = 7;
    cc.problem_params = {{"N", 30}, {"d", 2}, {"C", 100.0}, {"box_radius", 10.0}};
    cc.graph_seed = 8;
    cc.graph_params = {{"p", 0.1}, {"directed", false}};
    cc.algorithm = "cc-convex";
    cc.rounds = 100;
    return std::vector<RunConfig>{cc};
  }
  if (name == "ch4-lp") {
    RunConfig cc = base("ch4-lp-cc");
    cc.problem_generator = "random-lp";
    cc.problem_seed = 9;
    cc.problem_params = {{"N", 30}, {"d", 3}, {"M", 10.0}};
    cc.graph_seed = 10;
    cc.graph_params = {{"p", 0.2}, {"directed", true}};
    cc.algorithm = "cc-lp";
    cc.rounds = 1000;
    return std::vector<RunConfig>{cc};
  }
  std::string known;
  for (const auto& n : preset_names()) known += " " + n;
  throw ConfigError("unknown preset '" + name + "'; available:" + known);
}

CCLinearProgram make_random_cc_lp(int n_agents, int d, std::uint64_t seed) {
  Rng rng(seed);
  CCLinearProgram lp;
  lp.c.resize(d);
  for (int k = 0; k < d; ++k) lp.c(k) = rng.normal();
  lp.A.resize(n_agents, d);
  lp.b.resize(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    Eigen::VectorXd a(d);
    for (int k = 0; k < d; ++k) a(k) = rng.normal();
    const double nrm = a.norm();
    if (nrm > 1e-12)
      lp.A.row(i) = a.transpose() / nrm;
    else
      lp.A.row(i) = Eigen::RowVectorXd::Unit(d, 0);
    lp.b(i) = 0.2 + 0.8 * rng.uniform();
  }
  lp.M = 10.0;
  return lp;
}

namespace {

CostCoupledProblem build_cost_coupled(const RunConfig& cfg) {
  const json& p = cfg.problem_params;
  if (cfg.problem_generator == "logistic")
    return make_logistic(iparam(p, "N", 30), iparam(p, "m_i", 10),
                         iparam(p, "d", 5), param(p, "C", 0.01),
                         cfg.problem_seed);
  if (cfg.problem_generator == "lasso")
    return make_lasso(iparam(p, "N", 10), iparam(p, "n_i", 5), iparam(p, "d", 8),
                      param(p, "rho", 1.0), cfg.problem_seed);
  return make_random_qp(iparam(p, "N", 10), iparam(p, "d", 5),
                        param(p, "eig_lo", 1.0), param(p, "eig_hi", 10.0),
                        cfg.problem_seed);
}

ConstraintCoupledProblem build_constraint_coupled(const RunConfig& cfg) {
  const json& p = cfg.problem_params;
  MicrogridOptions opt;
  opt.horizon = iparam(p, "horizon", opt.horizon);
  if (p.contains("demand_base") || p.contains("demand_amp")) {
    const double base = param(p, "demand_base", 0.3);
    const double amp = param(p, "demand_amp", 0.05);
    opt.demand.resize(opt.horizon + 1);
    for (int s = 0; s <= opt.horizon; ++s)
      opt.demand(s) = base + amp * std::sin(M_PI * s / 6.0);
  }
  return make_microgrid(iparam(p, "n_gen", 4), iparam(p, "n_stor", 3),
                        iparam(p, "n_conl", 2), opt, cfg.problem_seed);
}

CommonCostProblem build_common_cost(const RunConfig& cfg) {
  const json& p = cfg.problem_params;
  SoftSvmOptions opt;
  opt.C = param(p, "C", 100.0);
  opt.box_radius = param(p, "box_radius", 10.0);
  return make_soft_svm(iparam(p, "N", 30), iparam(p, "d", 2), opt,
                       cfg.problem_seed);
}

CommGraph build_graph(const RunConfig& cfg, int n) {
  const json& g = cfg.graph_params;
  const double prob = param(g, "p", 0.2);
  const bool directed = g.value("directed", false);
  return erdos_renyi_graph(n, prob, cfg.graph_seed, directed,
                           directed ? ConnectivityRequirement::StronglyConnected
                                    : ConnectivityRequirement::Connected);
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const std::string& a = cfg.algorithm;
  try {
    if (a == "dsg" || a == "gt") {
      const CostCoupledProblem prob = build_cost_coupled(cfg);
      const CommGraph g = build_graph(cfg, prob.n_agents());
      const WeightMatrix w = metropolis_hastings_weights(g);
      PrimalRunOptions opt;
      opt.algorithm = a == "gt" ? PrimalAlgorithm::Gt : PrimalAlgorithm::Dsg;
      opt.schedule = cfg.schedule;
      opt.rounds = cfg.rounds;
      opt.reference = centralized_reference_solve(prob);
      const PrimalRunResult res = run_primal(prob, w, opt);
      return {res.trace, opt.reference};
    }
    if (a == "ddec") {
      const CostCoupledProblem prob = build_cost_coupled(cfg);
      const CommGraph g = build_graph(cfg, prob.n_agents());
      DdecRunOptions opt;
      opt.schedule = cfg.schedule;
      opt.rounds = cfg.rounds;
      opt.reference = centralized_reference_solve(prob);
      return {run_ddec(prob, g, opt).trace, opt.reference};
    }
    if (a == "dadmm") {
      const CostCoupledProblem prob = build_cost_coupled(cfg);
      const CommGraph g = build_graph(cfg, prob.n_agents());
      DadmmRunOptions opt;
      opt.rho = cfg.rho;
      opt.rounds = cfg.rounds;
      opt.reference = centralized_reference_solve(prob);
      return {run_dadmm(prob, g, opt).trace, opt.reference};
    }
    if (a == "dual-subgradient") {
      const ConstraintCoupledProblem prob = build_constraint_coupled(cfg);
      const CommGraph g = build_graph(cfg, prob.n_agents());
      const WeightMatrix w = metropolis_hastings_weights(g);
      DualSubgrRunOptions opt;
      opt.schedule = cfg.schedule;
      opt.rounds = cfg.rounds;
      opt.reference = centralized_reference_solve(prob);
      return {run_dual_subgradient(prob, w, opt).trace, opt.reference};
    }
    if (a == "rsdd") {
      const ConstraintCoupledProblem prob = build_constraint_coupled(cfg);
      const CommGraph g = build_graph(cfg, prob.n_agents());
      RsddRunOptions opt;
      opt.schedule = cfg.schedule;
      opt.M = cfg.M;
      opt.rounds = cfg.rounds;
      opt.reference = centralized_reference_solve(prob);
      return {run_rsdd(prob, g, opt).trace, opt.reference};
    }
    if (a == "cc-lp") {
      const json& p = cfg.problem_params;
      const CCLinearProgram lp = make_random_cc_lp(
          iparam(p, "N", 30), iparam(p, "d", 3), cfg.problem_seed);
      const CommGraph g = build_graph(cfg, static_cast<int>(lp.b.size()));
      CCRunOptions opt;
      opt.max_rounds = cfg.rounds;
      opt.reference = lex_lp_solve(lp.c, lp.A, lp.b, lp.M).report;
      return {run_cc_lp(lp, GraphSchedule::fixed(g), opt).trace, opt.reference};
    }
    // cc-convex
    const CommonCostProblem prob = build_common_cost(cfg);
    const CommGraph g = build_graph(cfg, prob.n_agents());
    CCRunOptions opt;
    opt.max_rounds = cfg.rounds;
    opt.reference = centralized_reference_solve(prob);
    return {run_cc_convex(prob, GraphSchedule::fixed(g), opt).trace,
            opt.reference};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("run '" + cfg.name + "' failed: " + e.what());
  }
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::pair<double, double> tail_loglinear_fit(const std::vector<double>& t,
                                             const std::vector<double>& y,
                                             double tail_fraction) {
  const size_t n = t.size();
  const size_t start = n - static_cast<size_t>(std::ceil(tail_fraction * n));
  std::vector<double> ts, ls;
  for (size_t k = start; k < n; ++k) {
    if (y[k] > 0.0 && std::isfinite(y[k])) {
      ts.push_back(t[k]);
      ls.push_back(std::log10(y[k]));
    }
  }
  const size_t m = ts.size();
  if (m < 3) return {0.0, 0.0};
  double st = 0, sl = 0;
  for (size_t k = 0; k < m; ++k) {
    st += ts[k];
    sl += ls[k];
  }
  const double mt = st / m, ml = sl / m;
  double num = 0, den = 0, ss_tot = 0;
  for (size_t k = 0; k < m; ++k) {
    num += (ts[k] - mt) * (ls[k] - ml);
    den += (ts[k] - mt) * (ts[k] - mt);
    ss_tot += (ls[k] - ml) * (ls[k] - ml);
  }
  if (den <= 0.0) return {0.0, 0.0};
  const double slope = num / den;
  double ss_res = 0;
  for (size_t k = 0; k < m; ++k) {
    const double fit = ml + slope * (ts[k] - mt);
    ss_res += (ls[k] - fit) * (ls[k] - fit);
  }
  const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return {slope, r2};
}

std::string summarize_trace(const MetricsTrace& trace) {
  std::ostringstream out;
  out << "metric,final,tail_slope,tail_r2\n";
  if (trace.rows.empty()) return out.str();
  std::vector<double> t;
  for (const auto& row : trace.rows) t.push_back(row[0]);
  for (size_t c = 1; c < trace.columns.size(); ++c) {
    std::vector<double> y;
    for (const auto& row : trace.rows) y.push_back(row[c]);
    const auto [slope, r2] = tail_loglinear_fit(t, y);
    out << trace.columns[c] << ',' << fmt17(y.back()) << ',' << fmt17(slope)
        << ',' << fmt17(r2) << '\n';
  }
  return out.str();
}

void emit_trace(const MetricsTrace& trace, const std::string& stem,
                const std::string& format) {
  if (format != "csv")
    throw ConfigError("emit_trace: only format 'csv' is supported");
  {
    std::ofstream f(stem + ".csv");
    if (!f) throw std::runtime_error("emit_trace: cannot open " + stem + ".csv");
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(trace.oracle_hash));
    f << "# oracle_hash=" << hash << '\n';
    for (size_t c = 0; c < trace.columns.size(); ++c)
      f << (c ? "," : "") << trace.columns[c];
    f << '\n';
    for (const auto& row : trace.rows) {
      for (size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << fmt17(row[c]);
      f << '\n';
    }
    if (!f) throw std::runtime_error("emit_trace: write failed on " + stem + ".csv");
  }
  std::ofstream s(stem + ".summary.csv");
  if (!s)
    throw std::runtime_error("emit_trace: cannot open " + stem + ".summary.csv");
  s << summarize_trace(trace);
  if (!s)
    throw std::runtime_error("emit_trace: write failed on " + stem + ".summary.csv");
}

MetricsTrace parse_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_trace_csv: cannot open " + path);
  MetricsTrace trace;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("oracle_hash=");
      if (pos != std::string::npos)
        trace.oracle_hash = std::stoull(line.substr(pos + 12), nullptr, 16);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    if (!header_seen) {
      while (std::getline(ss, cell, ',')) trace.columns.push_back(cell);
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != trace.columns.size())
      throw std::runtime_error("parse_trace_csv: ragged row in " + path);
    trace.rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("parse_trace_csv: missing header in " + path);
  return trace;
}

namespace {

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  try {
    return RunConfig::from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError("config error in " + path + ": " + e.what());
  }
}

void apply_overrides(RunConfig* cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<long>& rounds,
                     const std::string& out_dir, const std::string& format) {
  if (seed) {
    cfg->problem_seed = *seed;
    cfg->graph_seed = *seed + 1;
  }
  if (rounds) cfg->rounds = *rounds;
  if (!out_dir.empty()) cfg->out_dir = out_dir;
  if (!format.empty()) cfg->format = format;
}

int run_and_emit(const RunConfig& cfg) {
  const ExperimentResult res = run_experiment(cfg);
  const std::string stem = cfg.out_dir + "/" + cfg.name;
  emit_trace(res.trace, stem, cfg.format);
  std::cout << cfg.name << ": " << res.trace.rows.size() << " rows -> " << stem
            << ".csv (f* = " << res.reference.value << ")\n";
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"distributed-optimization experiment runner"};
  app.require_subcommand(1);

  std::string config_path, preset_name, oracle_arg;
  std::optional<std::uint64_t> seed;
  std::optional<long> rounds;
  std::string out_dir, format;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "override the problem seed (graph seed follows)");
    sub->add_option("--rounds", rounds, "override the round horizon");
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_option("--format", format, "trace format (csv)");
  };

  CLI::App* run = app.add_subcommand("run", "run a JSON config");
  run->add_option("config", config_path, "config file")->required();
  add_common(run);

  CLI::App* preset = app.add_subcommand("preset", "run a named experiment bundle");
  preset->add_option("name", preset_name, "preset name")->required();
  add_common(preset);

  CLI::App* oracle = app.add_subcommand(
      "oracle", "centralized reference solve only (config file or preset name)");
  oracle->add_option("config", oracle_arg, "config file or preset name")->required();
  add_common(oracle);

  CLI::App* validate = app.add_subcommand("validate", "parse and check a config");
  validate->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      RunConfig cfg = load_config(config_path);
      apply_overrides(&cfg, seed, rounds, out_dir, format);
      cfg.validate();
      return run_and_emit(cfg);
    }
    if (preset->parsed()) {
      std::vector<RunConfig> cfgs = preset_configs(preset_name);
      for (RunConfig& cfg : cfgs) {
        apply_overrides(&cfg, seed, rounds, out_dir, format);
        cfg.validate();
      }
      for (const RunConfig& cfg : cfgs) {
        const int rc = run_and_emit(cfg);
        if (rc != 0) return rc;
      }
      return 0;
    }
    if (oracle->parsed()) {
      std::vector<RunConfig> cfgs;
      std::ifstream probe(oracle_arg);
      if (probe.good())
        cfgs.push_back(load_config(oracle_arg));
      else
        cfgs = preset_configs(oracle_arg);
      for (RunConfig& cfg : cfgs) {
        apply_overrides(&cfg, seed, rounds, out_dir, format);
        cfg.rounds = 0;
        const ExperimentResult res = run_experiment(cfg);
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(report_hash(res.reference)));
        std::cout << cfg.name << ": f* = " << fmt17(res.reference.value)
                  << " status = " << to_string(res.reference.status)
                  << " hash = " << hash;
        if (res.reference.multipliers.size() > 0)
          std::cout << " |mu*|_1 = " << fmt17(res.reference.multipliers.lpNorm<1>())
                    << " |mu*|_inf = "
                    << fmt17(res.reference.multipliers.lpNorm<Eigen::Infinity>());
        std::cout << '\n';
      }
      return 0;
    }
    // validate
    load_config(config_path);
    std::cout << config_path << ": ok\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace dopt
