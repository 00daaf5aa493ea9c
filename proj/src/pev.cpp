#include "dmilp/pev.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dmilp/certificates.hpp"
#include "dmilp/parallel.hpp"

namespace dmilp {

using nlohmann::json;

const char* to_string(PevSetup setup) {
  return setup == PevSetup::ChargeOnly ? "charge_only" : "vehicle_to_grid";
}

PevSetup parse_pev_setup(const std::string& text) {
  if (text == "charge_only") return PevSetup::ChargeOnly;
  if (text == "vehicle_to_grid" || text == "v2g") return PevSetup::VehicleToGrid;
  throw ConfigError("unknown setup \"" + text + "\"");
}

double PevConfig::effective_grid_scale() const {
  if (grid_scale) return *grid_scale;
  return setup == PevSetup::ChargeOnly ? 0.8 : 0.6;
}

double PevConfig::grid_limit() const {
  const double base = p_max ? *p_max : effective_grid_scale() * double(m) * rate.mean();
  return base * capacity_scale;
}

void PevConfig::check() const {
  if (m == 0) throw ConfigError("m must be at least 1");
  if (T == 0) throw ConfigError("T must be at least 1");
  const auto ordered = [](const Band& b, const char* name) {
    if (!(b.lo <= b.hi)) throw ConfigError(std::string(name) + " band is not ordered");
  };
  ordered(price, "price");
  ordered(rate, "rate");
  ordered(capacity, "capacity");
  ordered(soc_init, "soc_init");
  ordered(soc_target, "soc_target");
  if (rate.lo <= 0.0) throw ConfigError("charge rates must be positive");
  if (capacity.lo <= 0.0) throw ConfigError("capacities must be positive");
  if (soc_init.lo < 0.0 || soc_target.hi > 1.0)
    throw ConfigError("state-of-charge fractions must lie in [0, 1]");
  if (!(slot_hours > 0.0)) throw ConfigError("slot_hours must be positive");
  if (price_jitter < 0.0 || price_jitter >= 1.0) throw ConfigError("price_jitter must lie in [0, 1)");
  if (discharge_value < 0.0) throw ConfigError("discharge_value must be nonnegative");
  if (!(capacity_scale > 0.0)) throw ConfigError("capacity_scale must be positive");
  if (grid_scale && !(*grid_scale > 0.0)) throw ConfigError("grid_scale must be positive");
  if (p_max && !(*p_max > 0.0)) throw ConfigError("p_max must be positive");
}

namespace {

Band band_from(const json& j, const char* key, Band fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(key) + " must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

struct Vehicle {
  Vector price;  // per-vehicle slot prices
  double rate = 0.0;
  double capacity = 0.0;
  double init = 0.0;    // kWh
  double target = 0.0;  // kWh
};

double draw(std::mt19937_64& rng, const Band& b) {
  return b.lo == b.hi ? b.lo : std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
}

Vehicle draw_vehicle(const PevConfig& cfg, const Vector& price, std::mt19937_64& rng) {
  const auto draw = [&rng](const Band& b) { return dmilp::draw(rng, b); };
  for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    Vehicle v;
    const Band jitter{1.0 - cfg.price_jitter, 1.0 + cfg.price_jitter};
    for (double p : price) v.price.push_back(p * draw(jitter));
    v.rate = draw(cfg.rate);
    v.capacity = draw(cfg.capacity);
    v.init = draw(cfg.soc_init) * v.capacity;
    v.target = draw(cfg.soc_target) * v.capacity;
    const double e = v.rate * cfg.slot_hours;
    const double need = v.target - v.init;
    const double slots = need <= 0.0 ? 0.0 : std::ceil(need / e - 1e-9);
    if (slots <= double(cfg.T) && slots <= std::floor((v.capacity - v.init) / e + 1e-9)) return v;
  }
  throw ConfigError("no reachable state-of-charge target after " +
                    std::to_string(cfg.max_retries) + " redraws");
}

AgentProblem vehicle_block(const PevConfig& cfg, const Vehicle& v, std::size_t id) {
  const Vector& price = v.price;
  const std::size_t T = cfg.T;
  const double e = v.rate * cfg.slot_hours;
  const bool v2g = cfg.setup == PevSetup::VehicleToGrid;
  const std::size_t n = v2g ? 2 * T : T;

  AgentProblem a;
  a.id = id;
  a.c.assign(n, 0.0);
  a.A = Matrix(T, n);
  for (std::size_t t = 0; t < T; ++t) {
    a.c[t] = price[t] * e;
    a.A(t, t) = v.rate;
    if (v2g) {
      a.c[T + t] = -cfg.discharge_value * price[t] * e;
      a.A(t, T + t) = -v.rate;
    }
  }

  // Every slot moves the same energy e, so the state-of-charge limits are
  // counts of net charging slots: need / e rounded up, headroom and initial
  // charge rounded down. Same integer points, tighter relaxation.
  const double need = v.target - v.init;
  const double min_net = need <= 0.0 ? 0.0 : std::ceil(need / e - 1e-9);
  const double max_net = std::floor((v.capacity - v.init) / e + 1e-9);
  const double max_drain = std::floor(v.init / e + 1e-9);

  Vector row(n, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    row[t] = -1.0;
    if (v2g) row[T + t] = 1.0;
  }
  a.D.append_row(row);
  a.d.push_back(-min_net);

  if (!v2g) {
    for (auto& x : row) x = -x;
    a.D.append_row(row);
    a.d.push_back(max_net);
  } else {
    for (std::size_t t = 0; t < T; ++t) {
      Vector excl(n, 0.0);
      excl[t] = excl[T + t] = 1.0;
      a.D.append_row(excl);
      a.d.push_back(1.0);
    }
    for (std::size_t t = 0; t < T; ++t) {
      Vector up(n, 0.0);
      for (std::size_t s = 0; s <= t; ++s) {
        up[s] = 1.0;
        up[T + s] = -1.0;
      }
      Vector down(up);
      for (auto& x : down) x = -x;
      a.D.append_row(up);
      a.d.push_back(max_net);
      a.D.append_row(down);
      a.d.push_back(max_drain);
    }
  }
  a.integrality.assign(n, true);
  a.lb.assign(n, 0.0);
  a.ub.assign(n, 1.0);
  return a;
}

}  // namespace

PevConfig pev_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed PEV config: ") + e.what());
  }
  PevConfig c;
  try {
    if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
    if (j.contains("T")) c.T = j.at("T").get<std::size_t>();
    if (j.contains("setup")) c.setup = parse_pev_setup(j.at("setup").get<std::string>());
    c.price = band_from(j, "price", c.price);
    c.rate = band_from(j, "rate", c.rate);
    c.capacity = band_from(j, "capacity", c.capacity);
    c.soc_init = band_from(j, "soc_init", c.soc_init);
    c.soc_target = band_from(j, "soc_target", c.soc_target);
    if (j.contains("slot_hours")) c.slot_hours = j.at("slot_hours").get<double>();
    if (j.contains("price_jitter")) c.price_jitter = j.at("price_jitter").get<double>();
    if (j.contains("discharge_value")) c.discharge_value = j.at("discharge_value").get<double>();
    if (j.contains("grid_scale")) c.grid_scale = j.at("grid_scale").get<double>();
    if (j.contains("p_max")) c.p_max = j.at("p_max").get<double>();
    if (j.contains("capacity_scale")) c.capacity_scale = j.at("capacity_scale").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad PEV config field: ") + e.what());
  }
  c.check();
  return c;
}

PevConfig load_pev_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return pev_config_from_json(ss.str());
}

std::string pev_config_to_json(const PevConfig& c) {
  const auto band = [](const Band& b) { return json::array({b.lo, b.hi}); };
  json j = {{"m", c.m},
            {"T", c.T},
            {"setup", to_string(c.setup)},
            {"price", band(c.price)},
            {"rate", band(c.rate)},
            {"capacity", band(c.capacity)},
            {"soc_init", band(c.soc_init)},
            {"soc_target", band(c.soc_target)},
            {"slot_hours", c.slot_hours},
            {"price_jitter", c.price_jitter},
            {"discharge_value", c.discharge_value},
            {"grid_scale", c.effective_grid_scale()},
            {"capacity_scale", c.capacity_scale},
            {"seed", c.seed},
            {"max_retries", c.max_retries}};
  if (c.p_max) j["p_max"] = *c.p_max;
  return j.dump(2);
}

CoupledInstance generate(const PevConfig& config) {
  config.check();
  std::mt19937_64 rng(config.seed);
  Vector price(config.T);
  for (auto& p : price) p = draw(rng, config.price);

  CoupledInstance inst;
  inst.name = std::string("pev_") + to_string(config.setup) + "_m" + std::to_string(config.m) +
              "_T" + std::to_string(config.T) + "_s" + std::to_string(config.seed);
  inst.b.assign(config.T, config.grid_limit());
  for (std::size_t i = 0; i < config.m; ++i)
    inst.agents.push_back(vehicle_block(config, draw_vehicle(config, price, rng), i));
  validate(inst);
  return inst;
}

StepSchedule pev_schedule(const PevConfig& config) {
  return StepSchedule::power(config.price.mean() * config.slot_hours /
                              (double(config.m) * config.rate.mean()), 0.6);
}

ComparisonReport compare(const CoupledInstance& instance, const RunOptions& options,
                         RunTrace* alg1) {
  ComparisonReport r;
  RunOptions adaptive = options;
  adaptive.frozen_rho.reset();
  RunTrace trace = run_algorithm1(instance, adaptive);
  r.rho_bar_inf = norm_inf(trace.tightening.rho);
  r.j_bar = trace.summary.final_cost;
  r.alg1_feasible = trace.summary.final_feasible;
  r.alg1_settled = trace.summary.settled.has_value();
  r.alg1_iterations = trace.summary.iterations;
  r.rho_tilde_inf = norm_inf(worst_case(instance, options.jobs, options.milp).rho_tilde);
  r.delta_rho_pct =
      r.rho_tilde_inf > 0.0 ? (r.rho_tilde_inf - r.rho_bar_inf) / r.rho_tilde_inf * 100.0 : 0.0;

  try {
    const BaselineResult base = baseline_recover(instance, options);
    r.baseline_iterations = base.trace.summary.iterations;
    r.baseline_dual_converged = base.dual_converged;
    if (!base.feasible) {
      r.baseline_failed = true;
      r.baseline_failure = "recovered point violates the coupling constraint";
    } else {
      r.j_tilde = base.cost;
    }
  } catch (const BaselineInfeasible& e) {
    r.baseline_failed = true;
    r.baseline_failure = e.what();
  }
  if (r.j_tilde && r.alg1_feasible && *r.j_tilde != 0.0)
    r.delta_j_pct = (*r.j_tilde - r.j_bar) / std::abs(*r.j_tilde) * 100.0;
  if (alg1) *alg1 = std::move(trace);
  return r;
}

std::vector<SweepRow> sweep(const std::vector<PevConfig>& configs, const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (const auto& cfg : configs)
    for (std::size_t t = 0; t < options.trials; ++t) {
      SweepRow row;
      row.trial = rows.size();
      row.m = cfg.m;
      row.setup = cfg.setup;
      row.seed = cfg.seed + t;
      rows.push_back(row);
    }

  std::vector<const PevConfig*> owner;
  for (const auto& cfg : configs)
    for (std::size_t t = 0; t < options.trials; ++t) owner.push_back(&cfg);

  parallel_for(rows.size(), options.jobs, [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    const auto started = std::chrono::steady_clock::now();
    try {
      PevConfig cfg = *owner[idx];
      cfg.seed = row.seed;
      const CoupledInstance inst = generate(cfg);
      RunOptions run = options.run;
      run.jobs = 1;
      if (options.auto_schedule) run.schedule = pev_schedule(cfg);
      RunTrace alg1;
      row.report = compare(inst, run, &alg1);
      if (options.with_alg2) {
        RunOptions best = run;
        best.budget = std::max<std::size_t>(1, alg1.summary.iterations);
        best.record_messages = false;
        const RunTrace alg2 = run_algorithm2(inst, best);
        if (alg2.best) row.alg2_best = alg2.best->cost;
      }
      if (options.with_oracle) {
        MilpOptions mo = run.milp;
        mo.node_limit = options.oracle_node_limit;
        try {
          const MilpResult opt = solve_monolithic(inst, mo);
          if (opt.status == MilpStatus::Optimal) row.optimum = opt.value;
        } catch (const NodeLimitExceeded&) {
        }
      }
      if (row.optimum && *row.optimum != 0.0) {
        const double scale = std::abs(*row.optimum);
        if (row.report.alg1_feasible)
          row.alg1_gap_pct = (row.report.j_bar - *row.optimum) / scale * 100.0;
        if (row.alg2_best) row.alg2_gap_pct = (*row.alg2_best - *row.optimum) / scale * 100.0;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    row.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  });
  return rows;
}

std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins) {
  if (values.empty() || bins == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) return {{lo, hi, values.size()}};
  const double width = (hi - lo) / double(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * double(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * double(b + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    out[std::min(b, bins - 1)].count++;
  }
  return out;
}

namespace {

std::string num(std::optional<double> v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(12) << *v;
  return os.str();
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "trial,m,setup,delta_rho_pct,delta_j_pct,alg1_gap_pct,alg2_gap_pct,baseline_failed,"
        "runtime_s,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.trial << ',' << r.m << ',' << to_string(r.setup) << ','
       << (r.error.empty() ? num(r.report.delta_rho_pct) : "") << ','
       << num(r.report.delta_j_pct) << ',' << num(r.alg1_gap_pct) << ','
       << num(r.alg2_gap_pct) << ',' << (r.report.baseline_failed ? 1 : 0) << ','
       << num(r.runtime_s) << ',' << err << '\n';
  }
  return os.str();
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) os << num(b.lo) << ',' << num(b.hi) << ',' << b.count << '\n';
  return os.str();
}

}  // namespace dmilp
