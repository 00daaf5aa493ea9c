#include "dmilp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dmilp {

MilpBlock MilpBlock::from_agent(const AgentProblem& agent) {
  MilpBlock block;
  block.rows = agent.D.rows() > 0 ? agent.D : Matrix(0, agent.num_vars());
  block.rhs = agent.d;
  block.lb = agent.lb;
  block.ub = agent.ub;
  block.integrality = agent.integrality;
  return block;
}

namespace {

struct Node {
  Vector lb;
  Vector ub;
};

void round_integer_bounds(const MilpBlock& block, Vector& lb, Vector& ub, double int_tol) {
  for (std::size_t j = 0; j < block.num_vars(); ++j) {
    if (!block.integrality[j]) continue;
    lb[j] = std::ceil(lb[j] - int_tol);
    ub[j] = std::floor(ub[j] + int_tol);
  }
}

}  // namespace

MilpResult solve_milp(const MilpBlock& block, std::span<const double> objective,
                      const MilpOptions& options) {
  const std::size_t n = block.num_vars();
  if (objective.size() != n || block.ub.size() != n || block.integrality.size() != n)
    throw PreconditionError("solve_milp: objective/bounds/integrality length mismatch");

  LpProblem lp;
  lp.objective.assign(objective.begin(), objective.end());
  lp.constraints = block.rows.rows() > 0 ? block.rows : Matrix(0, n);
  lp.rhs = block.rhs;

  MilpResult result;
  double incumbent = std::numeric_limits<double>::infinity();

  std::vector<Node> stack;
  {
    Node root{block.lb, block.ub};
    round_integer_bounds(block, root.lb, root.ub, options.int_tol);
    stack.push_back(std::move(root));
  }

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (++result.node_count > options.node_limit)
      throw NodeLimitExceeded("branch and bound exceeded " + std::to_string(options.node_limit) +
                              " nodes");

    bool empty_box = false;
    for (std::size_t j = 0; j < n; ++j) empty_box = empty_box || node.lb[j] > node.ub[j];
    if (empty_box) continue;

    lp.lb = node.lb;
    lp.ub = node.ub;
    const LpResult relax = solve_lp(lp, options.lp);
    if (relax.status == LpStatus::Infeasible) continue;
    if (relax.value >= incumbent - options.prune_gap) continue;

    std::size_t branch_var = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!block.integrality[j]) continue;
      const double v = relax.x[j];
      if (std::abs(v - std::round(v)) > options.int_tol) {
        branch_var = j;
        break;
      }
    }

    if (branch_var == n) {
      result.x = relax.x;
      for (std::size_t j = 0; j < n; ++j)
        if (block.integrality[j]) result.x[j] = std::round(result.x[j]);
      result.value = dot(objective, result.x);
      result.status = MilpStatus::Optimal;
      incumbent = result.value;
      continue;
    }

    // Pushed up-first so the down branch is explored first.
    const double v = relax.x[branch_var];
    Node up = node;
    up.lb[branch_var] = std::ceil(v);
    Node& down = node;
    down.ub[branch_var] = std::floor(v);
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }
  return result;
}

BestResponse best_response(const AgentProblem& agent, const MilpBlock& block,
                           std::span<const double> lambda, const MilpOptions& options) {
  if (lambda.size() != agent.A.rows())
    throw PreconditionError("best_response: lambda has length " + std::to_string(lambda.size()) +
                            ", expected " + std::to_string(agent.A.rows()));
  for (double l : lambda)
    if (!(l >= 0.0)) throw PreconditionError("best_response: lambda must be nonnegative");

  Vector objective = multiply_transposed(agent.A, lambda);
  for (std::size_t j = 0; j < objective.size(); ++j) objective[j] += agent.c[j];

  const MilpResult r = solve_milp(block, objective, options);
  if (r.status == MilpStatus::Infeasible)
    throw ValidationError(ValidationKind::InfeasibleLocalSet,
                          "agent " + std::to_string(agent.id) + ": local set X_i is empty");
  BestResponse br;
  br.x = r.x;
  br.lagrangian_value = r.value;
  br.cost = dot(agent.c, r.x);
  return br;
}

BestResponse best_response(const AgentProblem& agent, std::span<const double> lambda,
                           const MilpOptions& options) {
  return best_response(agent, MilpBlock::from_agent(agent), lambda, options);
}

namespace {

std::optional<std::vector<Vector>> list_points(const MilpBlock& block, std::size_t limit) {
  std::size_t combos = 1;
  for (std::size_t j = 0; j < block.num_vars(); ++j) {
    if (!block.integrality[j]) return std::nullopt;
    const double width = std::floor(block.ub[j]) - std::ceil(block.lb[j]) + 1.0;
    if (width < 1.0) return std::vector<Vector>{};
    if (width > double(limit) || double(combos) * width > double(limit)) return std::nullopt;
    combos *= static_cast<std::size_t>(width);
  }
  LpProblem region;
  region.constraints = block.rows;
  region.rhs = block.rhs;
  region.lb = block.lb;
  region.ub = block.ub;

  std::vector<Vector> points;
  Vector x(block.num_vars());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::ceil(block.lb[j]);
  for (std::size_t c = 0; c < combos; ++c) {
    if (lp_feasible(region, x)) points.push_back(x);
    for (std::size_t j = x.size(); j-- > 0;) {
      if (x[j] + 1.0 <= block.ub[j]) {
        x[j] += 1.0;
        break;
      }
      x[j] = std::ceil(block.lb[j]);
    }
  }
  return points;
}

}  // namespace

BestResponder::BestResponder(const AgentProblem& agent, const MilpOptions& options)
    : agent_(&agent), block_(MilpBlock::from_agent(agent)), options_(options),
      points_(list_points(block_, kMaxListedPoints)) {}

BestResponse BestResponder::respond(std::span<const double> lambda) const {
  if (!points_ || points_->empty()) return best_response(*agent_, block_, lambda, options_);
  const AgentProblem& agent = *agent_;
  if (lambda.size() != agent.A.rows())
    throw PreconditionError("best_response: lambda has length " + std::to_string(lambda.size()) +
                            ", expected " + std::to_string(agent.A.rows()));
  for (double l : lambda)
    if (!(l >= 0.0)) throw PreconditionError("best_response: lambda must be nonnegative");

  Vector objective = multiply_transposed(agent.A, lambda);
  for (std::size_t j = 0; j < objective.size(); ++j) objective[j] += agent.c[j];

  const double inf = std::numeric_limits<double>::infinity();
  double best = inf, second = inf;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < points_->size(); ++k) {
    const double v = dot(objective, (*points_)[k]);
    if (v < best) {
      second = best;
      best = v;
      arg = k;
    } else if (v < second) {
      second = v;
    }
  }
  if (second - best <= 1e-9 * std::max(1.0, std::abs(best)))
    return best_response(agent, block_, lambda, options_);
  BestResponse br;
  br.x = (*points_)[arg];
  br.lagrangian_value = best;
  br.cost = dot(agent.c, br.x);
  return br;
}

MilpBlock stack_instance(const CoupledInstance& instance) {
  const std::size_t n = instance.total_vars();
  std::size_t local_rows = 0;
  for (const auto& a : instance.agents) local_rows += a.D.rows();
  const std::size_t p = instance.num_coupling();

  MilpBlock block;
  block.rows = Matrix(local_rows + p, n);
  block.rhs.reserve(local_rows + p);
  std::size_t row = 0;
  std::size_t offset = 0;
  for (const auto& a : instance.agents) {
    for (std::size_t r = 0; r < a.D.rows(); ++r, ++row) {
      for (std::size_t j = 0; j < a.num_vars(); ++j) block.rows(row, offset + j) = a.D(r, j);
      block.rhs.push_back(a.d[r]);
    }
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t j = 0; j < a.num_vars(); ++j)
        block.rows(local_rows + r, offset + j) = a.A(r, j);
    block.lb.insert(block.lb.end(), a.lb.begin(), a.lb.end());
    block.ub.insert(block.ub.end(), a.ub.begin(), a.ub.end());
    block.integrality.insert(block.integrality.end(), a.integrality.begin(), a.integrality.end());
    offset += a.num_vars();
  }
  block.rhs.insert(block.rhs.end(), instance.b.begin(), instance.b.end());
  return block;
}

Vector stacked_cost(const CoupledInstance& instance) {
  Vector c;
  for (const auto& a : instance.agents) c.insert(c.end(), a.c.begin(), a.c.end());
  return c;
}

std::vector<Vector> split_stacked(const CoupledInstance& instance, std::span<const double> x) {
  std::vector<Vector> parts;
  std::size_t offset = 0;
  for (const auto& a : instance.agents) {
    parts.emplace_back(x.begin() + offset, x.begin() + offset + a.num_vars());
    offset += a.num_vars();
  }
  return parts;
}

MilpResult solve_monolithic(const CoupledInstance& instance, const MilpOptions& options) {
  return solve_milp(stack_instance(instance), stacked_cost(instance), options);
}

}  // namespace dmilp
