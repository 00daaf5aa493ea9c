#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmilp/certificates.hpp"
#include "dmilp/coordinator.hpp"
#include "dmilp/milp.hpp"
#include "dmilp/model.hpp"
#include "dmilp/pev.hpp"

namespace dmilp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string instance_path;
  std::string pev_config_path;
  std::string mode = "alg1";
  std::optional<double> a0;
  std::optional<double> exponent;
  std::size_t stop_window = 50;
  std::size_t max_iter = 10'000;
  std::size_t budget = 0;
  bool certify = false;
  bool oracle = false;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::size_t trials = 1;
  std::size_t bins = 20;
  std::size_t node_limit = 1'000'000;
};

struct Loaded {
  CoupledInstance instance;
  std::optional<PevConfig> pev;
};

Loaded load(const RunConfig& cfg) {
  if (cfg.instance_path.empty() == cfg.pev_config_path.empty())
    throw ConfigError("give exactly one of --instance or --pev-config");
  Loaded l;
  if (!cfg.instance_path.empty()) {
    l.instance = load_instance(cfg.instance_path);
  } else {
    PevConfig pev = load_pev_config(cfg.pev_config_path);
    if (cfg.seed) pev.seed = *cfg.seed;
    l.instance = generate(pev);
    l.pev = pev;
  }
  return l;
}

StepSchedule schedule_for(const RunConfig& cfg, const Loaded& l) {
  StepSchedule s = l.pev ? pev_schedule(*l.pev) : StepSchedule::default_for(l.instance);
  if (cfg.a0) s.a0 = *cfg.a0;
  if (cfg.exponent) s.exponent = *cfg.exponent;
  s.kind = s.exponent == 1.0 ? StepSchedule::Kind::Harmonic : StepSchedule::Kind::Power;
  if (!s.satisfies_step_conditions())
    throw ConfigError("step schedule needs a0 > 0 and exponent in (0.5, 1]");
  return s;
}

RunOptions run_options(const RunConfig& cfg, const Loaded& l) {
  RunOptions o;
  o.schedule = schedule_for(cfg, l);
  o.stop = default_stop_rule(cfg.stop_window, cfg.max_iter);
  o.jobs = cfg.jobs;
  o.budget = cfg.budget;
  o.record_messages = false;
  return o;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

std::string trace_csv(const RunTrace& trace, std::size_t p) {
  std::ostringstream os;
  os << "k";
  for (std::size_t j = 0; j < p; ++j) os << ",lambda_" << j;
  os << ",max_violation,rho_inf,gamma,cost,feasible,best_cost\n";
  for (const auto& r : trace.rows) {
    os << r.k;
    for (double l : r.lambda) os << ',' << num(l);
    os << ',' << num(r.max_violation) << ',' << num(norm_inf(r.rho)) << ',' << num(r.gamma)
       << ',' << num(r.cost) << ',' << (r.feasible ? 1 : 0) << ',';
    if (r.best_cost) os << num(*r.best_cost);
    os << '\n';
  }
  return os.str();
}

json instance_json(const CoupledInstance& inst, const std::optional<PevConfig>& pev) {
  json j = {{"name", inst.name},
            {"fingerprint", fingerprint(inst)},
            {"m", inst.num_agents()},
            {"p", inst.num_coupling()}};
  if (pev) {
    j["pev_config"] = json::parse(pev_config_to_json(*pev));
    j["parameter_bands"] = "approximate defaults, not a published parameter table";
  }
  return j;
}

json certificate_json(const Certificate& c) {
  return {{"gamma_bar", c.gamma_bar},
          {"rho_bar", c.rho_bar},
          {"gamma_tilde", c.gamma_tilde},
          {"rho_tilde", c.rho_tilde},
          {"zeta", opt(c.zeta)},
          {"zeta_tilde", opt(c.zeta_tilde)},
          {"bound_new", opt(c.bound_new)},
          {"bound_baseline", opt(c.bound_baseline)},
          {"optimum", opt(c.optimum)},
          {"achieved_gap", opt(c.achieved_gap)},
          {"assumptions_unverified", c.assumptions_unverified},
          {"bound_absent_reason", c.bound_absent_reason}};
}

std::optional<double> run_oracle(const CoupledInstance& inst, std::size_t node_limit,
                                 std::string& why_absent) {
  MilpOptions mo;
  mo.node_limit = node_limit;
  try {
    const MilpResult r = solve_monolithic(inst, mo);
    if (r.status == MilpStatus::Optimal) return r.value;
    why_absent = "coupled problem infeasible";
  } catch (const NodeLimitExceeded& e) {
    why_absent = e.what();
  }
  return std::nullopt;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  const CoupledInstance& inst = l.instance;
  RunOptions options = run_options(cfg, l);
  if (cfg.mode == "alg2" && cfg.budget == 0)
    throw ConfigError("--mode alg2 requires --budget");

  RunTrace trace;
  std::optional<BaselineResult> base;
  if (cfg.mode == "alg1") trace = run_algorithm1(inst, options);
  else if (cfg.mode == "alg2") trace = run_algorithm2(inst, options);
  else if (cfg.mode == "baseline") {
    base = baseline_recover(inst, options);
    trace = base->trace;
  } else {
    throw ConfigError("unknown mode " + cfg.mode);
  }

  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / "trace.csv", trace_csv(trace, inst.num_coupling()));

  const RunSummary& s = trace.summary;
  json summary = {{"instance", instance_json(inst, l.pev)},
                  {"mode", to_string(trace.mode)},
                  {"schedule",
                   {{"kind", trace.schedule.kind == StepSchedule::Kind::Harmonic ? "harmonic" : "power"},
                    {"a0", trace.schedule.a0},
                    {"exponent", trace.schedule.exponent}}},
                  {"stop", {{"window", trace.stop.window}, {"max_iter", trace.stop.max_iter}}},
                  {"iterations", s.iterations},
                  {"settled", opt(s.settled)},
                  {"k_feasible", opt(s.k_feasible)},
                  {"final_cost", s.final_cost},
                  {"final_feasible", s.final_feasible},
                  {"final_x", s.final_x},
                  {"stop_fired", s.stop_fired},
                  {"horizon_exhausted", s.horizon_exhausted},
                  {"rho_bar", trace.tightening.rho},
                  {"gamma_bar", trace.tightening.gamma}};
  if (cfg.mode == "alg2") {
    summary["budget"] = cfg.budget;
    summary["best_feasible_cost"] = trace.best ? json(trace.best->cost) : json(nullptr);
    summary["best_found_at"] = trace.best ? json(trace.best->found_at) : json(nullptr);
  }
  if (base) {
    summary["baseline"] = {{"rho_tilde", base->rho_tilde},
                           {"lambda", base->lambda},
                           {"cost", base->cost},
                           {"feasible", base->feasible},
                           {"dual_converged", base->dual_converged},
                           {"dual_residual", base->dual_residual}};
  }

  std::optional<double> optimum;
  std::string oracle_absent = "oracle not requested";
  if (cfg.oracle) optimum = run_oracle(inst, cfg.node_limit, oracle_absent);
  summary["oracle_optimum"] = opt(optimum);
  if (!optimum) summary["oracle_absent_reason"] = oracle_absent;

  if (cfg.certify) {
    try {
      summary["certificate"] = certificate_json(build_certificate(trace, inst, optimum));
    } catch (const NotSettled& e) {
      summary["certificate"] = nullptr;
      summary["certificate_absent_reason"] = e.what();
    }
  } else {
    summary["certificate"] = nullptr;
    summary["certificate_absent_reason"] = "certificate not requested";
  }
  write_file(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");

  const bool feasible = cfg.mode == "alg2" ? trace.best.has_value() : s.final_feasible;
  out << to_string(trace.mode) << ": " << s.iterations << " iterations, final cost "
      << num(s.final_cost) << (s.final_feasible ? " (feasible)" : " (infeasible)") << '\n';
  return feasible ? kExitOk : kExitNotFeasible;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  fs::create_directories(cfg.out);
  if (!cfg.instance_path.empty()) {
    const Loaded l = load(cfg);
    const ComparisonReport r = compare(l.instance, run_options(cfg, l));
    json j = {{"instance", instance_json(l.instance, l.pev)},
              {"rho_bar_inf", r.rho_bar_inf},
              {"rho_tilde_inf", r.rho_tilde_inf},
              {"j_bar", r.j_bar},
              {"j_tilde", opt(r.j_tilde)},
              {"delta_rho_pct", opt(r.delta_rho_pct)},
              {"delta_j_pct", opt(r.delta_j_pct)},
              {"alg1_feasible", r.alg1_feasible},
              {"baseline_failed", r.baseline_failed},
              {"baseline_failure", r.baseline_failure}};
    write_file(fs::path(cfg.out) / "compare.json", j.dump(2) + "\n");
    out << "delta_rho_pct " << (r.delta_rho_pct ? num(*r.delta_rho_pct) : "-")
        << " delta_j_pct " << (r.delta_j_pct ? num(*r.delta_j_pct) : "-")
        << (r.baseline_failed ? " baseline failed: " + r.baseline_failure : "") << '\n';
    return kExitOk;
  }
  if (cfg.pev_config_path.empty()) throw ConfigError("give --instance or --pev-config");
  PevConfig pev = load_pev_config(cfg.pev_config_path);
  if (cfg.seed) pev.seed = *cfg.seed;
  SweepOptions so;
  so.trials = cfg.trials;
  so.run.stop = default_stop_rule(cfg.stop_window, cfg.max_iter);
  so.run.record_messages = false;
  if (cfg.a0 || cfg.exponent) {
    so.auto_schedule = false;
    so.run.schedule = schedule_for(cfg, Loaded{generate(pev), pev});
  }
  so.with_alg2 = cfg.oracle;
  so.with_oracle = cfg.oracle;
  so.oracle_node_limit = cfg.node_limit;
  so.jobs = cfg.jobs;
  const auto rows = sweep({pev}, so);
  write_file(fs::path(cfg.out) / "sweep.csv", sweep_csv(rows));

  std::vector<double> drho, dj, g1, g2;
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.report.delta_rho_pct) drho.push_back(*r.report.delta_rho_pct);
    if (r.report.delta_j_pct) dj.push_back(*r.report.delta_j_pct);
    if (r.alg1_gap_pct) g1.push_back(*r.alg1_gap_pct);
    if (r.alg2_gap_pct) g2.push_back(*r.alg2_gap_pct);
    if (r.report.baseline_failed) ++failed;
  }
  write_file(fs::path(cfg.out) / "hist_delta_rho_pct.csv", histogram_csv(histogram(drho, cfg.bins)));
  write_file(fs::path(cfg.out) / "hist_delta_j_pct.csv", histogram_csv(histogram(dj, cfg.bins)));
  if (cfg.oracle) {
    write_file(fs::path(cfg.out) / "hist_alg1_gap_pct.csv", histogram_csv(histogram(g1, cfg.bins)));
    write_file(fs::path(cfg.out) / "hist_alg2_gap_pct.csv", histogram_csv(histogram(g2, cfg.bins)));
  }
  out << rows.size() << " trials, baseline failed in " << failed << '\n';
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const Loaded l = load(cfg);
  MilpOptions mo;
  mo.node_limit = cfg.node_limit;
  const MilpResult r = solve_monolithic(l.instance, mo);
  json j = {{"instance", instance_json(l.instance, l.pev)},
            {"status", r.status == MilpStatus::Optimal ? "optimal" : "infeasible"},
            {"node_count", r.node_count}};
  if (r.status == MilpStatus::Optimal) {
    j["optimum"] = r.value;
    j["x"] = split_stacked(l.instance, r.x);
  } else {
    j["optimum"] = nullptr;
  }
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / "oracle.json", j.dump(2) + "\n");
  if (r.status != MilpStatus::Optimal) {
    out << "coupled problem infeasible\n";
    return kExitNotFeasible;
  }
  out << "optimum " << num(r.value) << " after " << r.node_count << " nodes\n";
  return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--instance", cfg.instance_path, "Instance JSON file");
  sub->add_option("--pev-config", cfg.pev_config_path, "PEV fleet config JSON file");
  sub->add_option("--out", cfg.out, "Output directory");
  sub->add_option("--seed", cfg.seed, "Override the PEV config seed");
  sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void add_run(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--a0", cfg.a0, "Step scale a0");
  sub->add_option("--exponent", cfg.exponent, "Step exponent in (0.5, 1]");
  sub->add_option("--stop-window", cfg.stop_window, "Stop after this many settled feasible iterates")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", cfg.max_iter, "Iteration cap");
  sub->add_flag("--oracle", cfg.oracle, "Also solve the coupled problem exactly");
  sub->add_option("--node-limit", cfg.node_limit, "Branch-and-bound node cap for the oracle");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized MILP coordination with adaptive constraint tightening"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* solve = app.add_subcommand("solve", "Run the decentralized scheme on one instance");
  add_common(solve, cfg);
  add_run(solve, cfg);
  solve->add_option("--mode", cfg.mode, "alg1, alg2 or baseline")
      ->check(CLI::IsMember({"alg1", "alg2", "baseline"}));
  solve->add_option("--budget", cfg.budget, "Iteration budget (alg2)");
  solve->add_flag("--certify", cfg.certify, "Attach the suboptimality certificate");

  auto* cmp = app.add_subcommand("compare", "Adaptive vs worst-case tightening, one instance or a sweep");
  add_common(cmp, cfg);
  add_run(cmp, cfg);
  cmp->add_option("--trials", cfg.trials, "Seeded trials for a PEV sweep");
  cmp->add_option("--bins", cfg.bins, "Histogram bins")->check(CLI::PositiveNumber);

  auto* orc = app.add_subcommand("oracle", "Exact optimum of the coupled problem");
  add_common(orc, cfg);
  orc->add_option("--node-limit", cfg.node_limit, "Branch-and-bound node cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, out);
    if (cmp->parsed()) return cmd_compare(cfg, out);
    return cmd_oracle(cfg, out);
  } catch (const NodeLimitExceeded& e) {
    err << "NodeLimitExceeded: " << e.what() << '\n';
    return kExitNodeLimit;
  } catch (const ParseError& e) {
    err << "ParseError: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "ValidationError: " << e.what() << '\n';
  } catch (const ConfigError& e) {
    err << "ConfigError: " << e.what() << '\n';
  } catch (const BaselineInfeasible& e) {
    err << "BaselineInfeasible: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace dmilp::cli
