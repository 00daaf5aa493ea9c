#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dmilp/coordinator.hpp"
#include "dmilp/model.hpp"

namespace dmilp {

enum class PevSetup { ChargeOnly, VehicleToGrid };

const char* to_string(PevSetup setup);
PevSetup parse_pev_setup(const std::string& text);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  double mean() const { return 0.5 * (lo + hi); }
};

// Fleet of m vehicles over T slots. Each vehicle draws a charge rate, a
// battery capacity and initial/target state of charge (fractions of its
// capacity) from the bands; every slot draws a price. The network limit per
// slot is either `p_max` or grid_scale * m * mean(rate), times
// capacity_scale in both cases.
//
// The default bands are an approximation chosen for tractable, feasible
// desk-scale instances, not a published parameter table.
struct PevConfig {
  std::size_t m = 10;
  std::size_t T = 24;
  PevSetup setup = PevSetup::ChargeOnly;
  Band price{0.019, 0.035};    // per kWh
  Band rate{3.0, 5.0};         // kW
  Band capacity{8.0, 16.0};    // kWh
  Band soc_init{0.3, 0.5};
  Band soc_target{0.55, 0.8};
  double slot_hours = 1.0 / 3.0;
  // Each vehicle sees the slot price times its own factor from
  // [1 - price_jitter, 1 + price_jitter] (tariff and efficiency spread).
  double price_jitter = 0.2;
  // Fraction of the slot price a vehicle earns per discharged kWh (the rest
  // is battery wear).
  double discharge_value = 0.5;
  std::optional<double> grid_scale;  // defaults: 0.8 charge-only, 0.6 v2g
  std::optional<double> p_max;
  double capacity_scale = 1.0;
  std::uint64_t seed = 1;
  std::size_t max_retries = 100;

  double effective_grid_scale() const;
  double grid_limit() const;
  void check() const;  // ConfigError
};

PevConfig pev_config_from_json(const std::string& text);
PevConfig load_pev_config(const std::filesystem::path& path);
std::string pev_config_to_json(const PevConfig& config);

// Charge-only: binaries u_t, cost price_t e u_t (e = rate * slot_hours),
// coupling rows rate * u_t <= P_max. Vehicle-to-grid adds discharge binaries
// v_t with u_t + v_t <= 1, the state of charge kept in [0, capacity] after
// every slot, and coupling image rate * (u_t - v_t). Both require the final
// state of charge to reach the target. Vehicles whose target is unreachable
// are redrawn up to max_retries times.
CoupledInstance generate(const PevConfig& config);

// alpha(k) = a0 / (k+1)^0.6 scaled to the fleet: a0 = mean price * slot_hours / (m * mean rate).
// A full-fleet violation then moves lambda by about one slot price, the
// scale at which vehicles reorder their slots; larger steps overshoot into
// discharging and inflate the observed tightening. The slow decay keeps a
// small residual violation (one vehicle over the limit) from stalling.
StepSchedule pev_schedule(const PevConfig& config);

struct ComparisonReport {
  double rho_bar_inf = 0.0;
  double rho_tilde_inf = 0.0;
  double j_bar = 0.0;
  std::optional<double> j_tilde;
  std::optional<double> delta_rho_pct;
  std::optional<double> delta_j_pct;
  bool alg1_feasible = false;
  bool alg1_settled = false;
  std::size_t alg1_iterations = 0;
  bool baseline_failed = false;
  std::string baseline_failure;
  std::size_t baseline_iterations = 0;
  bool baseline_dual_converged = false;
};

// Algorithm 1 against the frozen worst-case tightening on the same
// instance. A failing baseline is flagged, not thrown. The Algorithm 1 trace
// is handed back through `alg1` when requested.
ComparisonReport compare(const CoupledInstance& instance, const RunOptions& options,
                         RunTrace* alg1 = nullptr);

struct SweepOptions {
  std::size_t trials = 10;
  RunOptions run;             // schedule replaced by pev_schedule when auto_schedule
  bool auto_schedule = true;
  bool with_alg2 = false;     // best-feasible run with budget = Algorithm 1 iterations
  bool with_oracle = false;   // monolithic optimum for the gap columns
  std::size_t oracle_node_limit = 200'000;
  std::size_t jobs = 1;       // trials in parallel
};

struct SweepRow {
  std::size_t trial = 0;
  std::size_t m = 0;
  PevSetup setup = PevSetup::ChargeOnly;
  std::uint64_t seed = 0;
  ComparisonReport report;
  std::optional<double> optimum;
  std::optional<double> alg2_best;
  std::optional<double> alg1_gap_pct;
  std::optional<double> alg2_gap_pct;
  std::string error;
  double runtime_s = 0.0;
};

// Trial t of a config uses seed config.seed + t.
std::vector<SweepRow> sweep(const std::vector<PevConfig>& configs, const SweepOptions& options);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [min, max] of the values; the last bin is closed.
std::vector<HistogramBin> histogram(const std::vector<double>& values, std::size_t bins);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string histogram_csv(const std::vector<HistogramBin>& bins);

}  // namespace dmilp
