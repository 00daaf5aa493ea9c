#include <cmath>
#include <limits>

#include "dmilp/milp.hpp"

namespace dmilp {

MilpResult exhaustive_oracle(const MilpBlock& block, std::span<const double> objective) {
  const std::size_t n = block.num_vars();
  std::vector<std::size_t> int_vars;
  std::vector<long long> lo;
  std::vector<long long> hi;
  double combinations = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!block.integrality[j]) continue;
    const long long a = static_cast<long long>(std::ceil(block.lb[j] - 1e-9));
    const long long b = static_cast<long long>(std::floor(block.ub[j] + 1e-9));
    if (b < a) return {};
    int_vars.push_back(j);
    lo.push_back(a);
    hi.push_back(b);
    combinations *= static_cast<double>(b - a + 1);
  }
  if (combinations > static_cast<double>(kMaxOracleCombinations))
    throw DimensionTooLarge("exhaustive_oracle: too many integer assignments");

  const bool has_continuous = int_vars.size() < n;
  LpProblem lp;
  lp.objective.assign(objective.begin(), objective.end());
  lp.constraints = block.rows.rows() > 0 ? block.rows : Matrix(0, n);
  lp.rhs = block.rhs;
  lp.lb = block.lb;
  lp.ub = block.ub;

  MilpResult best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<long long> assignment = lo;
  for (;;) {
    ++best.node_count;
    for (std::size_t k = 0; k < int_vars.size(); ++k) {
      lp.lb[int_vars[k]] = static_cast<double>(assignment[k]);
      lp.ub[int_vars[k]] = static_cast<double>(assignment[k]);
    }
    Vector x;
    double value = 0.0;
    bool feasible = false;
    if (has_continuous) {
      const LpResult r = solve_lp(lp);
      if (r.status == LpStatus::Optimal) {
        x = r.x;
        value = r.value;
        feasible = true;
      }
    } else {
      x = lp.lb;
      feasible = lp_feasible(lp, x);
      value = dot(objective, x);
    }
    if (feasible && value < best_value) {
      best_value = value;
      best.x = x;
      best.value = value;
      best.status = MilpStatus::Optimal;
    }

    std::size_t k = 0;
    while (k < assignment.size() && assignment[k] == hi[k]) {
      assignment[k] = lo[k];
      ++k;
    }
    if (k == assignment.size()) break;
    ++assignment[k];
  }
  return best;
}

MilpResult exhaustive_oracle(const CoupledInstance& instance) {
  return exhaustive_oracle(stack_instance(instance), stacked_cost(instance));
}

}  // namespace dmilp
