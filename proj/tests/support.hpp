#pragma once

#include <cstdint>
#include <random>

#include "dmilp/milp.hpp"
#include "dmilp/model.hpp"

namespace dmilp::testing {

// Two agents, one binary each, costs -3 and -2, coupling x1 + x2 <= b.
CoupledInstance t1_instance(double b = 1.0);

AgentProblem binary_agent(std::size_t id, std::vector<double> c, Matrix A);

// Random bounded block with n variables (first `binaries` integer in {0,1},
// the rest continuous in [0, 1] or small integer ranges) and q random rows.
struct RandomBlock {
  MilpBlock block;
  Vector objective;
};
RandomBlock random_block(std::mt19937_64& rng, std::size_t n, std::size_t q);

// Random LP with n variables in boxes and r rows.
LpProblem random_lp(std::mt19937_64& rng, std::size_t n, std::size_t r);

}  // namespace dmilp::testing
