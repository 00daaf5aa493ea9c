#include "dmilp/coordinator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "dmilp/parallel.hpp"

namespace dmilp {

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Algorithm1: return "alg1";
    case RunMode::Algorithm2: return "alg2";
    case RunMode::Baseline: return "baseline";
  }
  return "unknown";
}

StopRule default_stop_rule(std::size_t window, std::size_t max_iter) {
  if (window == 0) throw PreconditionError("stop rule window must be at least 1");
  return StopRule{window, max_iter};
}

bool stop_rule_fires(const StopRule& rule, std::span<const TraceRow> rows, double tol) {
  if (rule.window == 0 || rows.size() < rule.window) return false;
  const auto tail = rows.last(rule.window);
  const TraceRow& first = tail.front();
  for (const TraceRow& row : tail) {
    if (!row.feasible) return false;
    if (std::abs(row.gamma - first.gamma) > tol) return false;
    for (std::size_t j = 0; j < row.rho.size(); ++j)
      if (std::abs(row.rho[j] - first.rho[j]) > tol) return false;
  }
  return true;
}

std::vector<TighteningSnapshot> RunTrace::tightening_history() const {
  std::vector<TighteningSnapshot> h;
  h.reserve(rows.size());
  for (const auto& r : rows) h.push_back({r.rho, r.gamma});
  return h;
}

namespace {

// Agent-side state. Private data (c_i, D_i, d_i, x_i) stays here; respond()
// produces the message that crosses to the central unit.
class Agent {
 public:
  Agent(const AgentProblem& problem, const MilpOptions& options)
      : problem_(problem), responder_(problem, options) {}

  AgentMessage respond(std::span<const double> lambda, bool share_cost) {
    BestResponse br = responder_.respond(lambda);
    x_ = std::move(br.x);
    cost_ = br.cost;
    AgentMessage msg;
    msg.agent_id = problem_.id;
    msg.image = multiply(problem_.A, x_);
    if (share_cost) msg.cost = cost_;
    return msg;
  }

  const Vector& tentative() const { return x_; }
  // Local cost of the tentative solution; read only by the run's diagnostics
  // (gamma(k) bookkeeping and the trace), never placed in a message unless
  // the run is in best-feasible mode.
  double local_cost() const { return cost_; }

 private:
  const AgentProblem& problem_;
  BestResponder responder_;
  Vector x_;
  double cost_ = 0.0;
};

class CentralLoop {
 public:
  CentralLoop(const CoupledInstance& instance, const RunOptions& options, RunMode mode)
      : instance_(instance), options_(options), mode_(mode) {
    validate(instance_, false);
    if (!options_.schedule.satisfies_step_conditions())
      throw PreconditionError("step schedule must satisfy alpha -> 0 with divergent sum");
    if (options_.frozen_rho && options_.frozen_rho->size() != instance_.num_coupling())
      throw PreconditionError("frozen rho length differs from p");
    for (const auto& a : instance_.agents) agents_.emplace_back(a, options_.milp);
  }

  RunTrace run() {
    const std::size_t m = instance_.num_agents();
    const std::size_t p = instance_.num_coupling();
    const bool best_feasible_mode = mode_ == RunMode::Algorithm2;
    const std::size_t horizon = best_feasible_mode ? options_.budget : options_.stop.max_iter;
    const auto started = std::chrono::steady_clock::now();

    RunTrace trace;
    trace.mode = mode_;
    trace.schedule = options_.schedule;
    trace.stop = options_.stop;
    trace.tightening = TighteningState::initial(m, p);

    Vector lambda(p, 0.0);
    std::vector<AgentMessage> round(m);
    Vector costs(m);
    Vector images_sum(p);

    for (std::size_t k = 0; k < horizon; ++k) {
      parallel_for(m, options_.jobs, [&](std::size_t i) {
        round[i] = agents_[i].respond(lambda, best_feasible_mode);
      });
      for (std::size_t i = 0; i < m; ++i) costs[i] = agents_[i].local_cost();

      std::vector<Vector> images;
      images.reserve(m);
      for (const auto& msg : round) images.push_back(msg.image);
      trace.tightening.observe(images, costs);

      std::fill(images_sum.begin(), images_sum.end(), 0.0);
      for (const auto& img : images)
        for (std::size_t j = 0; j < p; ++j) images_sum[j] += img[j];

      TraceRow row;
      row.k = k + 1;
      row.max_violation = std::numeric_limits<double>::lowest();
      row.feasible = true;
      for (std::size_t j = 0; j < p; ++j) {
        const double v = images_sum[j] - instance_.b[j];
        row.max_violation = std::max(row.max_violation, v);
        if (v > options_.feas_tol) row.feasible = false;
      }
      row.cost = 0.0;
      for (double c : costs) row.cost += c;
      row.rho = trace.tightening.rho;
      row.gamma = trace.tightening.gamma;

      if (best_feasible_mode) {
        // The central unit only sees the shared costs here.
        double shared_cost = 0.0;
        for (const auto& msg : round) shared_cost += *msg.cost;
        if (row.feasible && (!trace.best || shared_cost < trace.best->cost)) {
          BestFeasible best;
          best.cost = shared_cost;
          best.found_at = row.k;
          for (const auto& a : agents_) best.x.push_back(a.tentative());
          trace.best = std::move(best);
        }
        if (trace.best) row.best_cost = trace.best->cost;
      }

      const Vector& rho = options_.frozen_rho ? *options_.frozen_rho : trace.tightening.rho;
      const double alpha = options_.schedule.alpha(k);
      for (std::size_t j = 0; j < p; ++j)
        lambda[j] = std::max(0.0, lambda[j] + alpha * (images_sum[j] - instance_.b[j] + rho[j]));
      row.lambda = lambda;
      row.alpha = alpha;

      if (options_.record_messages) trace.messages.push_back(round);
      if (options_.record_iterates) {
        std::vector<Vector> xs;
        xs.reserve(m);
        for (const auto& a : agents_) xs.push_back(a.tentative());
        trace.iterates.push_back(std::move(xs));
      }
      trace.rows.push_back(std::move(row));

      if (!best_feasible_mode && stop_rule_fires(options_.stop, trace.rows)) {
        trace.summary.stop_fired = true;
        break;
      }
      if (options_.wall_clock_seconds) {
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        if (elapsed.count() >= *options_.wall_clock_seconds) {
          trace.summary.wall_clock_exhausted = true;
          break;
        }
      }
    }

    summarise(trace);
    return trace;
  }

 private:
  void summarise(RunTrace& trace) const {
    RunSummary& s = trace.summary;
    s.iterations = trace.rows.size();
    s.horizon_exhausted = mode_ != RunMode::Algorithm2 && !s.stop_fired;
    if (!trace.rows.empty()) {
      const TraceRow& last = trace.rows.back();
      s.final_cost = last.cost;
      s.final_feasible = last.feasible;
      for (const auto& a : agents_) s.final_x.push_back(a.tentative());
      if (last.feasible) {
        std::size_t start = trace.rows.size();
        while (start > 0 && trace.rows[start - 1].feasible) --start;
        s.k_feasible = trace.rows[start].k;
      }
      const auto history = trace.tightening_history();
      s.settled = settled(history);
    }
  }

  const CoupledInstance& instance_;
  RunOptions options_;
  RunMode mode_;
  std::vector<Agent> agents_;
};

}  // namespace

RunTrace run_algorithm1(const CoupledInstance& instance, const RunOptions& options) {
  return CentralLoop(instance, options, options.frozen_rho ? RunMode::Baseline : RunMode::Algorithm1)
      .run();
}

RunTrace run_algorithm2(const CoupledInstance& instance, const RunOptions& options) {
  if (options.budget == 0 && !options.wall_clock_seconds)
    throw PreconditionError("best-feasible mode needs an iteration or wall-clock budget");
  RunOptions opts = options;
  if (opts.budget == 0) opts.budget = std::numeric_limits<std::size_t>::max();
  return CentralLoop(instance, opts, RunMode::Algorithm2).run();
}

Vector primal_average(std::span<const Vector> iterates, std::span<const double> alphas) {
  const std::size_t k = iterates.size();
  if (k < 2) throw PreconditionError("primal_average needs at least two iterates");
  if (alphas.size() < k) throw PreconditionError("primal_average needs alpha(1..k-1)");
  Vector avg(iterates.front().size(), 0.0);
  double weight = 0.0;
  for (std::size_t r = 1; r < k; ++r) {
    const Vector& x = iterates[r];  // x(r+1)
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += alphas[r] * x[j];
    weight += alphas[r];
  }
  for (double& v : avg) v /= weight;
  return avg;
}

std::vector<Vector> primal_average(const RunTrace& trace) {
  if (trace.iterates.size() < 2)
    throw PreconditionError("primal_average: run did not record at least two iterates");
  const std::size_t k = trace.iterates.size();
  Vector alphas(k);
  for (std::size_t r = 0; r < k; ++r) alphas[r] = trace.schedule.alpha(r);
  std::vector<Vector> out;
  const std::size_t m = trace.iterates.front().size();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Vector> xs;
    xs.reserve(k);
    for (const auto& it : trace.iterates) xs.push_back(it[i]);
    out.push_back(primal_average(xs, alphas));
  }
  return out;
}

}  // namespace dmilp
