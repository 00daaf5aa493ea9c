#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dmilp/errors.hpp"
#include "dmilp/matrix.hpp"

namespace dmilp {

// One agent's local block: min c'x over X = {x : D x <= d, lb <= x <= ub,
// x_j integer where integrality[j]}, contributing A x to the coupling rows.
// Finite bounds are mandatory, which makes every X bounded by construction.
struct AgentProblem {
  std::size_t id = 0;
  Vector c;
  Matrix A;  // p x n
  Matrix D;  // q x n
  Vector d;
  std::vector<bool> integrality;
  Vector lb;
  Vector ub;

  std::size_t num_vars() const { return c.size(); }
  std::size_t num_integer() const;
  std::size_t num_continuous() const { return num_vars() - num_integer(); }

  bool operator==(const AgentProblem&) const = default;
};

// Problem (P): min sum c_i'x_i  s.t.  sum A_i x_i <= b,  x_i in X_i.
struct CoupledInstance {
  std::string name;
  Vector b;
  std::vector<AgentProblem> agents;

  std::size_t num_agents() const { return agents.size(); }
  std::size_t num_coupling() const { return b.size(); }
  std::size_t total_vars() const;

  bool operator==(const CoupledInstance&) const = default;
};

struct ValidationReport {
  std::size_t m = 0;
  std::size_t p = 0;
  std::size_t total_vars = 0;
  std::size_t total_integer = 0;
};

// Throws ValidationError on the first violated invariant. When
// check_local_sets is set, each X_i is probed for emptiness with a MILP
// feasibility solve.
ValidationReport validate(const CoupledInstance& instance, bool check_local_sets = true);

// Structural checks of a single block (dimensions and bounds only).
void validate_agent(const AgentProblem& agent, std::size_t p);

// Generated alpha(k) = a0 / (k + 1)^exponent. "harmonic" pins exponent to 1.
struct StepSchedule {
  enum class Kind { Harmonic, Power };
  Kind kind = Kind::Harmonic;
  double a0 = 1.0;
  double exponent = 1.0;

  double alpha(std::size_t k) const;
  // a0 > 0 and exponent in (0.5, 1]: alpha -> 0 with a divergent sum.
  bool satisfies_step_conditions() const;

  static StepSchedule harmonic(double a0) { return {Kind::Harmonic, a0, 1.0}; }
  static StepSchedule power(double a0, double exponent) { return {Kind::Power, a0, exponent}; }
  // a0 = 1 / max(1, ||b||_inf)
  static StepSchedule default_for(const CoupledInstance& instance);
};

inline constexpr int kInstanceFormatVersion = 1;

CoupledInstance load_instance(const std::filesystem::path& path);
void save_instance(const CoupledInstance& instance, const std::filesystem::path& path);

// String forms used by the file functions; exposed for tests and fingerprinting.
CoupledInstance parse_instance(const std::string& text);
std::string serialize_instance(const CoupledInstance& instance);

// Stable 64-bit FNV-1a digest of the serialized instance, as 16 hex digits.
std::string fingerprint(const CoupledInstance& instance);

}  // namespace dmilp
