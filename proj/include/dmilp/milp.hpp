#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dmilp/matrix.hpp"
#include "dmilp/model.hpp"
#include "dmilp/simplex.hpp"

namespace dmilp {

// Feasible region of a mixed-integer block: rows x <= rhs, lb <= x <= ub,
// integrality mask. Objectives are supplied per solve.
struct MilpBlock {
  Matrix rows;
  Vector rhs;
  Vector lb;
  Vector ub;
  std::vector<bool> integrality;

  std::size_t num_vars() const { return lb.size(); }

  static MilpBlock from_agent(const AgentProblem& agent);
};

struct MilpOptions {
  std::size_t node_limit = 1'000'000;
  double int_tol = 1e-6;
  double prune_gap = 1e-9;
  LpTolerances lp;
};

enum class MilpStatus { Optimal, Infeasible };

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  std::size_t node_count = 0;
};

// Depth-first branch and bound: branch on the lowest-index fractional
// integer variable, down branch first, incumbent replaced only on strict
// improvement beyond prune_gap. The node order is fixed, so among tied optima
// the same point is returned on every call.
MilpResult solve_milp(const MilpBlock& block, std::span<const double> objective,
                      const MilpOptions& options = {});

struct BestResponse {
  Vector x;
  double lagrangian_value = 0.0;  // (c + A'lambda)'x
  double cost = 0.0;              // c'x
};

// x_i(lambda) in argmin over X_i of (c_i + A_i'lambda)'x. lambda must be
// componentwise nonnegative (PreconditionError otherwise); an empty X_i
// raises ValidationError(InfeasibleLocalSet).
BestResponse best_response(const AgentProblem& agent, std::span<const double> lambda,
                           const MilpOptions& options = {});
BestResponse best_response(const AgentProblem& agent, const MilpBlock& block,
                           std::span<const double> lambda, const MilpOptions& options = {});

// best_response with a per-agent memo. Small pure-integer blocks have their
// feasible points listed once; a call whose minimiser over that list is
// unique (by more than 1e-9 relative) answers from the list, any near-tie
// goes to solve_milp. Either way the result equals best_response.
class BestResponder {
 public:
  static constexpr std::size_t kMaxListedPoints = 4096;

  explicit BestResponder(const AgentProblem& agent, const MilpOptions& options = {});

  BestResponse respond(std::span<const double> lambda) const;
  bool listed() const { return points_.has_value(); }

 private:
  const AgentProblem* agent_;
  MilpBlock block_;
  MilpOptions options_;
  std::optional<std::vector<Vector>> points_;
};

// Problem (P) as one block: agents stacked block-diagonally, coupling rows
// appended after all local rows.
MilpBlock stack_instance(const CoupledInstance& instance);
Vector stacked_cost(const CoupledInstance& instance);
MilpResult solve_monolithic(const CoupledInstance& instance, const MilpOptions& options = {});

// Splits a stacked point back into per-agent vectors.
std::vector<Vector> split_stacked(const CoupledInstance& instance, std::span<const double> x);

inline constexpr std::size_t kMaxOracleCombinations = std::size_t{1} << 20;

// Exact optimum by enumerating every integer assignment in the box and
// solving the continuous remainder with solve_lp. Test oracle; throws
// DimensionTooLarge beyond kMaxOracleCombinations assignments.
MilpResult exhaustive_oracle(const MilpBlock& block, std::span<const double> objective);
MilpResult exhaustive_oracle(const CoupledInstance& instance);

}  // namespace dmilp
