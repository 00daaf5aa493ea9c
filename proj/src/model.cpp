#include "dmilp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmilp/milp.hpp"

namespace dmilp {

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::DimensionMismatch: return "DimensionMismatch";
    case ValidationKind::Unbounded: return "Unbounded";
    case ValidationKind::InfeasibleLocalSet: return "InfeasibleLocalSet";
  }
  return "Unknown";
}

std::size_t AgentProblem::num_integer() const {
  return static_cast<std::size_t>(std::count(integrality.begin(), integrality.end(), true));
}

std::size_t CoupledInstance::total_vars() const {
  std::size_t n = 0;
  for (const auto& a : agents) n += a.num_vars();
  return n;
}

namespace {

[[noreturn]] void mismatch(const AgentProblem& agent, const std::string& what) {
  throw ValidationError(ValidationKind::DimensionMismatch,
                        "agent " + std::to_string(agent.id) + ": " + what);
}

}  // namespace

void validate_agent(const AgentProblem& agent, std::size_t p) {
  const std::size_t n = agent.num_vars();
  if (n == 0) mismatch(agent, "no decision variables");
  if (agent.A.rows() != p || agent.A.cols() != n)
    mismatch(agent, "A must be " + std::to_string(p) + "x" + std::to_string(n) + ", got " +
                        std::to_string(agent.A.rows()) + "x" + std::to_string(agent.A.cols()));
  if (agent.D.rows() != agent.d.size())
    mismatch(agent, "D has " + std::to_string(agent.D.rows()) + " rows but d has " +
                        std::to_string(agent.d.size()) + " entries");
  if (agent.D.rows() > 0 && agent.D.cols() != n)
    mismatch(agent, "D must have " + std::to_string(n) + " columns");
  if (agent.integrality.size() != n) mismatch(agent, "integrality length differs from n");
  if (agent.lb.size() != n || agent.ub.size() != n) mismatch(agent, "bounds length differs from n");

  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(agent.lb[j]) || !std::isfinite(agent.ub[j]))
      throw ValidationError(ValidationKind::Unbounded, "agent " + std::to_string(agent.id) +
                                                           ": variable " + std::to_string(j) +
                                                           " lacks a finite bound");
    if (agent.lb[j] > agent.ub[j])
      throw ValidationError(ValidationKind::InfeasibleLocalSet,
                            "agent " + std::to_string(agent.id) + ": lb > ub for variable " +
                                std::to_string(j));
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(agent.c.begin(), agent.c.end(), finite) ||
      !std::all_of(agent.A.data().begin(), agent.A.data().end(), finite) ||
      !std::all_of(agent.D.data().begin(), agent.D.data().end(), finite) ||
      !std::all_of(agent.d.begin(), agent.d.end(), finite))
    mismatch(agent, "non-finite coefficient");
}

ValidationReport validate(const CoupledInstance& instance, bool check_local_sets) {
  ValidationReport report;
  report.m = instance.num_agents();
  report.p = instance.num_coupling();
  if (report.m == 0)
    throw ValidationError(ValidationKind::DimensionMismatch, "instance has no agents");
  if (report.p == 0)
    throw ValidationError(ValidationKind::DimensionMismatch, "coupling vector b is empty");
  for (double v : instance.b)
    if (!std::isfinite(v))
      throw ValidationError(ValidationKind::DimensionMismatch, "non-finite entry in b");

  for (const auto& agent : instance.agents) {
    validate_agent(agent, report.p);
    report.total_vars += agent.num_vars();
    report.total_integer += agent.num_integer();
  }

  if (check_local_sets) {
    for (const auto& agent : instance.agents) {
      const MilpBlock block = MilpBlock::from_agent(agent);
      const Vector zero(agent.num_vars(), 0.0);
      if (solve_milp(block, zero).status == MilpStatus::Infeasible)
        throw ValidationError(ValidationKind::InfeasibleLocalSet,
                              "agent " + std::to_string(agent.id) + ": local set X_i is empty");
    }
  }
  return report;
}

double StepSchedule::alpha(std::size_t k) const {
  const double base = static_cast<double>(k) + 1.0;
  if (kind == Kind::Harmonic) return a0 / base;
  return a0 / std::pow(base, exponent);
}

bool StepSchedule::satisfies_step_conditions() const {
  if (!(a0 > 0.0)) return false;
  if (kind == Kind::Harmonic) return true;
  return exponent > 0.5 && exponent <= 1.0;
}

StepSchedule StepSchedule::default_for(const CoupledInstance& instance) {
  return harmonic(1.0 / std::max(1.0, norm_inf(instance.b)));
}

}  // namespace dmilp
