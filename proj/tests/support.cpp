#include "support.hpp"

namespace dmilp::testing {

AgentProblem binary_agent(std::size_t id, std::vector<double> c, Matrix A) {
  AgentProblem a;
  a.id = id;
  const std::size_t n = c.size();
  a.c = std::move(c);
  a.A = std::move(A);
  a.D = Matrix(0, n);
  a.integrality.assign(n, true);
  a.lb.assign(n, 0.0);
  a.ub.assign(n, 1.0);
  return a;
}

CoupledInstance t1_instance(double b) {
  CoupledInstance inst;
  inst.name = "t1";
  inst.b = {b};
  inst.agents.push_back(binary_agent(0, {-3.0}, Matrix{{1.0}}));
  inst.agents.push_back(binary_agent(1, {-2.0}, Matrix{{1.0}}));
  return inst;
}

RandomBlock random_block(std::mt19937_64& rng, std::size_t n, std::size_t q) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<int> kind(0, 3);
  RandomBlock out;
  auto& b = out.block;
  for (std::size_t j = 0; j < n; ++j) {
    switch (kind(rng)) {
      case 0:
      case 1:
        b.integrality.push_back(true);
        b.lb.push_back(0.0);
        b.ub.push_back(1.0);
        break;
      case 2:
        b.integrality.push_back(true);
        b.lb.push_back(-1.0);
        b.ub.push_back(2.0);
        break;
      default:
        b.integrality.push_back(false);
        b.lb.push_back(0.0);
        b.ub.push_back(1.5);
        break;
    }
    out.objective.push_back(coef(rng));
  }
  b.rows = Matrix(0, n);
  for (std::size_t i = 0; i < q; ++i) {
    Vector row(n);
    for (double& v : row) v = coef(rng);
    b.rows.append_row(row);
    // Slack around the box midpoint keeps most blocks feasible.
    double mid = 0.0;
    for (std::size_t j = 0; j < n; ++j) mid += row[j] * 0.5 * (b.lb[j] + b.ub[j]);
    b.rhs.push_back(mid + std::uniform_real_distribution<double>(-2.0, 4.0)(rng));
  }
  return out;
}

LpProblem random_lp(std::mt19937_64& rng, std::size_t n, std::size_t r) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> width(0.5, 3.0);
  LpProblem lp;
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective.push_back(coef(rng));
    const double lo = coef(rng);
    lp.lb.push_back(lo);
    lp.ub.push_back(lo + width(rng));
  }
  lp.constraints = Matrix(0, n);
  for (std::size_t i = 0; i < r; ++i) {
    Vector row(n);
    for (double& v : row) v = coef(rng);
    double mid = 0.0;
    for (std::size_t j = 0; j < n; ++j) mid += row[j] * 0.5 * (lp.lb[j] + lp.ub[j]);
    lp.constraints.append_row(row);
    lp.rhs.push_back(mid + std::uniform_real_distribution<double>(-1.5, 3.0)(rng));
  }
  return lp;
}

}  // namespace dmilp::testing
