#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dmilp/matrix.hpp"
#include "dmilp/milp.hpp"
#include "dmilp/model.hpp"

namespace dmilp {

// Running bookkeeping of the adaptive tightening: per-agent upper/lower
// envelopes of the observed coupling images A_i x_i(r) and of the observed
// local costs c_i'x_i(r), r <= k. Before the first observation the envelopes
// hold the numeric extremes (lowest for s_hi, max for s_lo).
struct TighteningState {
  std::vector<Vector> s_hi;
  std::vector<Vector> s_lo;
  std::vector<Vector> rho_i;
  Vector rho;  // p * componentwise max over agents of rho_i
  Vector gamma_hi;
  Vector gamma_lo;
  double gamma = 0.0;  // p * max over agents of (gamma_hi - gamma_lo)
  std::size_t k = 0;   // observations so far

  static TighteningState initial(std::size_t m, std::size_t p);

  std::size_t num_agents() const { return s_hi.size(); }
  std::size_t num_coupling() const { return rho.size(); }

  // Advances one iteration in place. Throws PreconditionError on shape errors.
  void observe(std::span<const Vector> images, std::span<const double> costs);
};

TighteningState observe(const TighteningState& state, std::span<const Vector> images,
                        std::span<const double> costs);

// Worst-case tightening over the whole local sets:
//   rho_tilde_j = p max_i (max_{X_i} [A_i]_j x - min_{X_i} [A_i]_j x)
//   gamma_tilde = p max_i (max_{X_i} c_i'x - min_{X_i} c_i'x)
struct WorstCaseBounds {
  Vector rho_tilde;
  double gamma_tilde = 0.0;
};

// Solves 2m(p+1) MILPs (fanned out over `jobs` workers). Results are memoised
// per instance fingerprint for the life of the process.
WorstCaseBounds worst_case(const CoupledInstance& instance, std::size_t jobs = 1,
                           const MilpOptions& options = {});

struct TighteningSnapshot {
  Vector rho;
  double gamma = 0.0;
};

// 1-based index of the first snapshot after which rho and gamma never change
// again (entries equal within tol count as unchanged). Absent when the last
// entry itself still differs from its predecessor.
std::optional<std::size_t> settled(std::span<const TighteningSnapshot> history, double tol = 1e-9);

}  // namespace dmilp
