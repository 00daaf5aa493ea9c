#include "dmilp/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "dmilp/simplex.hpp"

namespace dmilp {

namespace {

constexpr double kZetaTol = 1e-9;

// Stacked block with the coupling rhs replaced by b - rho.
MilpBlock tightened_stack(const CoupledInstance& instance, const Vector& rho) {
  MilpBlock block = stack_instance(instance);
  const std::size_t p = instance.num_coupling();
  const std::size_t first = block.rows.rows() - p;
  for (std::size_t j = 0; j < p; ++j) block.rhs[first + j] = instance.b[j] - rho[j];
  return block;
}

}  // namespace

std::optional<SlaterWitness> slater_margin(const CoupledInstance& instance, const Vector& rho,
                                           const MilpOptions& options) {
  const std::size_t p = instance.num_coupling();
  const std::size_t m = instance.num_agents();
  if (rho.size() != p) throw PreconditionError("rho length differs from p");
  for (double r : rho)
    if (r < 0.0) throw PreconditionError("rho must be nonnegative");

  const MilpBlock base = tightened_stack(instance, rho);
  const std::size_t n = base.num_vars();
  const std::size_t first = base.rows.rows() - p;

  // Upper bound on zeta from the box: the coupling rows cannot go below the
  // sum of per-coordinate minima.
  double zeta_max = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double low = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double a = base.rows(first + j, v);
      low += std::min(a * base.lb[v], a * base.ub[v]);
    }
    zeta_max = std::max(zeta_max, (base.rhs[first + j] - low) / double(m));
  }
  if (zeta_max <= kZetaTol) return std::nullopt;

  MilpBlock block;
  block.lb = base.lb;
  block.ub = base.ub;
  block.integrality = base.integrality;
  block.lb.push_back(0.0);
  block.ub.push_back(zeta_max);
  block.integrality.push_back(false);
  block.rhs = base.rhs;
  block.rows = Matrix(base.rows.rows(), n + 1);
  for (std::size_t r = 0; r < base.rows.rows(); ++r) {
    for (std::size_t v = 0; v < n; ++v) block.rows(r, v) = base.rows(r, v);
    if (r >= first) block.rows(r, n) = double(m);
  }
  Vector objective(n + 1, 0.0);
  objective[n] = -1.0;

  const MilpResult res = solve_milp(block, objective, options);
  if (res.status != MilpStatus::Optimal) return std::nullopt;
  const double zeta = res.x[n];
  if (zeta <= kZetaTol) return std::nullopt;
  SlaterWitness w;
  w.zeta = zeta;
  w.x = split_stacked(instance, std::span<const double>(res.x).first(n));
  return w;
}

double performance_bound(double gamma_bar, double rho_inf, std::size_t p, double zeta,
                         double gamma_tilde) {
  if (zeta <= 0.0 || p == 0) throw PreconditionError("bound needs zeta > 0 and p >= 1");
  return gamma_bar + rho_inf / (double(p) * zeta) * gamma_tilde;
}

BaselineResult baseline_recover(const CoupledInstance& instance, const RunOptions& options) {
  BaselineResult out;
  out.rho_tilde = worst_case(instance, options.jobs, options.milp).rho_tilde;

  const MilpBlock stacked = tightened_stack(instance, out.rho_tilde);
  LpProblem relaxation;
  relaxation.objective.assign(stacked.num_vars(), 0.0);
  relaxation.constraints = stacked.rows;
  relaxation.rhs = stacked.rhs;
  relaxation.lb = stacked.lb;
  relaxation.ub = stacked.ub;
  if (solve_lp(relaxation, options.milp.lp).status != LpStatus::Optimal)
    throw BaselineInfeasible("coupling tightened by the worst-case rho leaves an empty relaxation");

  RunOptions frozen = options;
  frozen.frozen_rho = out.rho_tilde;
  out.trace = run_algorithm1(instance, frozen);

  const auto& rows = out.trace.rows;
  out.lambda = rows.size() >= 2 ? rows[rows.size() - 2].lambda
                                : Vector(instance.num_coupling(), 0.0);
  out.x = out.trace.summary.final_x;
  out.cost = out.trace.summary.final_cost;
  out.feasible = out.trace.summary.final_feasible;

  std::size_t calm = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    double step = 0.0;
    for (std::size_t j = 0; j < rows[r].lambda.size(); ++j)
      step = std::max(step, std::abs(rows[r].lambda[j] - rows[r - 1].lambda[j]));
    out.dual_residual = step;
    calm = step <= kDualSettleTol ? calm + 1 : 0;
  }
  out.dual_converged = calm >= kDualSettleWindow;
  return out;
}

Certificate build_certificate(const RunTrace& run, const CoupledInstance& instance,
                              std::optional<double> optimum, const MilpOptions& options) {
  if (!run.summary.settled) throw NotSettled("tightening still changing at the end of the run");
  Certificate cert;
  cert.rho_bar = run.tightening.rho;
  cert.gamma_bar = run.tightening.gamma;
  const WorstCaseBounds wc = worst_case(instance, 1, options);
  cert.rho_tilde = wc.rho_tilde;
  cert.gamma_tilde = wc.gamma_tilde;
  const std::size_t p = instance.num_coupling();

  if (auto s = slater_margin(instance, cert.rho_bar, options)) {
    cert.zeta = s->zeta;
    cert.bound_new = performance_bound(cert.gamma_bar, norm_inf(cert.rho_bar), p, s->zeta,
                                       cert.gamma_tilde);
  } else {
    cert.bound_absent_reason = "no positive Slater margin under the settled tightening";
  }
  if (auto s = slater_margin(instance, cert.rho_tilde, options)) {
    cert.zeta_tilde = s->zeta;
    cert.bound_baseline = performance_bound(cert.gamma_tilde, norm_inf(cert.rho_tilde), p,
                                            s->zeta, cert.gamma_tilde);
  }
  if (optimum) {
    cert.optimum = optimum;
    cert.achieved_gap = run.summary.final_cost - *optimum;
  }
  return cert;
}

}  // namespace dmilp
