#pragma once

#include <cstddef>
#include <vector>

#include "dmilp/matrix.hpp"

namespace dmilp {

// min objective'x  s.t.  constraints x <= rhs,  lb <= x <= ub  (bounds finite).
struct LpProblem {
  Vector objective;
  Matrix constraints;
  Vector rhs;
  Vector lb;
  Vector ub;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rhs.size(); }
};

struct LpTolerances {
  double feas = 1e-8;
  double obj = 1e-7;
  double pivot = 1e-10;
};

enum class LpStatus { Optimal, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  bool is_vertex = false;
  std::size_t iterations = 0;
};

// Bounded-variable primal simplex on a dense tableau. Phase 1 minimizes a sum
// of artificials; pricing is Dantzig until a run of degenerate pivots trips
// the cycling guard, after which Bland's lowest-index rule takes over. The
// returned point is always a basic feasible solution. Throws
// NumericalBreakdown if a refactorization meets a singular basis.
LpResult solve_lp(const LpProblem& problem, const LpTolerances& tol = {});

// Feasibility of x within tol.feas, with each row's tolerance scaled by
// max(1, ||row||_inf, |rhs|).
bool lp_feasible(const LpProblem& problem, std::span<const double> x, double tol = 1e-8);

inline constexpr std::size_t kMaxEnumerationVars = 12;

// All vertices of {constraints x <= rhs, lb <= x <= ub}, deduplicated within
// tol. Brute force over active sets; a test oracle, throws DimensionTooLarge
// above kMaxEnumerationVars variables.
std::vector<Vector> enumerate_vertices(const LpProblem& problem, double tol = 1e-8);

}  // namespace dmilp
