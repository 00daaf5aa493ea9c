#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dmilp/coordinator.hpp"
#include "dmilp/milp.hpp"
#include "dmilp/model.hpp"
#include "dmilp/tightening.hpp"

namespace dmilp {

struct SlaterWitness {
  double zeta = 0.0;
  std::vector<Vector> x;
};

// max zeta  s.t.  sum_i A_i x_i + m zeta 1 <= b - rho,  x_i in X_i,  zeta >= 0.
// Present only when the optimum is strictly positive.
std::optional<SlaterWitness> slater_margin(const CoupledInstance& instance, const Vector& rho,
                                           const MilpOptions& options = {});

// gamma_bar + ||rho||_inf / (p zeta) * gamma_tilde
double performance_bound(double gamma_bar, double rho_inf, std::size_t p, double zeta,
                         double gamma_tilde);

struct BaselineResult {
  Vector rho_tilde;
  Vector lambda;        // multiplier the recovered point responds to
  std::vector<Vector> x;
  double cost = 0.0;
  bool feasible = false;
  bool dual_converged = false;
  double dual_residual = 0.0;  // last ||lambda(k+1) - lambda(k)||_inf
  RunTrace trace;
};

inline constexpr std::size_t kDualSettleWindow = 100;
inline constexpr double kDualSettleTol = 1e-6;

// Dual subgradient with the tightening frozen at the worst-case rho_tilde.
// Throws BaselineInfeasible when the rho_tilde-tightened LP relaxation of the
// coupled problem is empty.
BaselineResult baseline_recover(const CoupledInstance& instance, const RunOptions& options);

struct Certificate {
  double gamma_bar = 0.0;
  Vector rho_bar;
  double gamma_tilde = 0.0;
  Vector rho_tilde;
  std::optional<double> zeta;
  std::optional<double> zeta_tilde;
  std::optional<double> bound_new;
  std::optional<double> bound_baseline;
  std::optional<double> optimum;
  std::optional<double> achieved_gap;
  // Uniqueness of the dual optima is never checked.
  bool assumptions_unverified = true;
  std::string bound_absent_reason;
};

// Throws NotSettled when the run's tightening never settled.
Certificate build_certificate(const RunTrace& run, const CoupledInstance& instance,
                              std::optional<double> optimum, const MilpOptions& options = {});

}  // namespace dmilp
