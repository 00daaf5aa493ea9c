#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dmilp/milp.hpp"
#include "dmilp/model.hpp"
#include "dmilp/tightening.hpp"

namespace dmilp {

// The only data an agent hands to the central unit each iteration: its
// coupling image A_i x_i(k+1), plus its local cost in best-feasible mode.
struct AgentMessage {
  std::size_t agent_id = 0;
  Vector image;
  std::optional<double> cost;
};

// One round per iteration, one message per agent per round.
using MessageLog = std::vector<std::vector<AgentMessage>>;

// Fires once the last `window` iterates are all coupling-feasible with rho
// and gamma unchanged across them; max_iter is a hard cap.
struct StopRule {
  std::size_t window = 50;
  std::size_t max_iter = 10'000;
};

StopRule default_stop_rule(std::size_t window = 50, std::size_t max_iter = 10'000);

struct TraceRow {
  std::size_t k = 0;
  Vector lambda;           // lambda(k), after the dual step that consumed x(k)
  double max_violation = 0.0;  // max_j (sum_i A_i x_i(k) - b)_j
  Vector rho;              // rho(k)
  double gamma = 0.0;      // gamma(k)
  double cost = 0.0;       // sum_i c_i'x_i(k)
  bool feasible = false;
  std::optional<double> best_cost;  // J-check after iteration k (best-feasible mode)
  double alpha = 0.0;      // step used to form lambda(k)
};

bool stop_rule_fires(const StopRule& rule, std::span<const TraceRow> rows, double tol = 1e-9);

struct BestFeasible {
  double cost = 0.0;
  std::vector<Vector> x;
  std::size_t found_at = 0;
};

enum class RunMode { Algorithm1, Algorithm2, Baseline };

const char* to_string(RunMode mode);

struct RunSummary {
  std::optional<std::size_t> k_feasible;  // start of the trailing all-feasible window
  std::optional<std::size_t> settled;
  std::vector<Vector> final_x;
  double final_cost = 0.0;
  bool final_feasible = false;
  bool stop_fired = false;
  bool horizon_exhausted = false;
  bool wall_clock_exhausted = false;
  std::size_t iterations = 0;
};

struct RunTrace {
  RunMode mode = RunMode::Algorithm1;
  StepSchedule schedule;
  StopRule stop;
  std::vector<TraceRow> rows;
  RunSummary summary;
  TighteningState tightening;
  std::optional<BestFeasible> best;
  MessageLog messages;
  // Per-iteration agent iterates x_i(k), recorded only on request. Diagnostic
  // data that never passes through the message channel.
  std::vector<std::vector<Vector>> iterates;

  std::vector<TighteningSnapshot> tightening_history() const;
};

struct RunOptions {
  StepSchedule schedule;
  StopRule stop;
  std::size_t jobs = 1;
  bool record_iterates = false;
  bool record_messages = true;
  // Best-feasible mode: iteration budget and optional wall-clock budget.
  std::size_t budget = 0;
  std::optional<double> wall_clock_seconds;
  // Replaces the adaptive rho(k) in the dual step by a fixed vector.
  std::optional<Vector> frozen_rho;
  MilpOptions milp;
  double feas_tol = 1e-8;
};

// Decentralized dual subgradient with adaptive tightening. Iteration k: every
// agent best-responds to lambda(k); the central unit updates the tightening
// envelopes from the images and takes the projected step
//   lambda(k+1) = [lambda(k) + alpha(k) (sum_i A_i x_i(k+1) - b + rho(k+1))]_+
// until the stop rule fires or max_iter is reached (summary.horizon_exhausted).
RunTrace run_algorithm1(const CoupledInstance& instance, const RunOptions& options);

// Same loop, additionally tracking the cheapest coupling-feasible iterate.
// Runs for options.budget iterations (or until the wall-clock budget expires).
RunTrace run_algorithm2(const CoupledInstance& instance, const RunOptions& options);

// Step-weighted running average of x(2..k) with weights alpha(1..k-1):
//   x~(k) = sum_{r=1}^{k-1} alpha(r) x(r+1) / sum_{r=1}^{k-1} alpha(r)
// iterates[r-1] holds x(r); alphas[r] holds alpha(r). Requires k >= 2.
Vector primal_average(std::span<const Vector> iterates, std::span<const double> alphas);

// x~_i(k) for every agent at the last recorded iteration of a run that kept
// its iterates.
std::vector<Vector> primal_average(const RunTrace& trace);

}  // namespace dmilp
