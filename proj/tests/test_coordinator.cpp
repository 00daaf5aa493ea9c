#include <doctest.h>

#include <random>

#include "dmilp/coordinator.hpp"
#include "support.hpp"

using namespace dmilp;

namespace {

RunOptions options_for(const CoupledInstance& inst, std::size_t window = 50,
                       std::size_t max_iter = 10'000) {
  RunOptions o;
  o.schedule = StepSchedule::default_for(inst);
  o.stop = default_stop_rule(window, max_iter);
  return o;
}

double coupling_sum(const CoupledInstance& inst, const std::vector<Vector>& x, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i < inst.num_agents(); ++i) s += dot(inst.agents[i].A.row(j), x[i]);
  return s;
}

}  // namespace

TEST_CASE("first iteration on T1") {
  const auto t1 = testing::t1_instance();
  auto o = options_for(t1, 50, 1);
  const auto trace = run_algorithm1(t1, o);
  REQUIRE(trace.rows.size() == 1);
  const auto& row = trace.rows[0];
  CHECK(row.k == 1);
  CHECK(row.max_violation == 1.0);
  CHECK(row.rho == Vector{0.0});
  CHECK(row.lambda == Vector{1.0});
  CHECK_FALSE(row.feasible);
  CHECK(trace.summary.horizon_exhausted);
}

TEST_CASE("locally optimal agents that already satisfy the coupling stay put") {
  const auto t1 = testing::t1_instance(2.0);
  const auto o = options_for(t1, 50);
  const auto trace = run_algorithm1(t1, o);
  CHECK(trace.summary.stop_fired);
  CHECK(trace.rows.size() == 50);
  for (const auto& row : trace.rows) CHECK(row.lambda == Vector{0.0});
  CHECK(trace.summary.final_cost == -5.0);
  const auto oracle = solve_monolithic(t1);
  CHECK(trace.summary.final_cost == oracle.value);
  CHECK(trace.summary.final_x == split_stacked(t1, oracle.x));
}

TEST_CASE("full T1 run ends feasible and no better than the optimum") {
  const auto t1 = testing::t1_instance();
  const auto trace = run_algorithm1(t1, options_for(t1));
  REQUIRE(trace.summary.stop_fired);
  CHECK(trace.summary.final_feasible);
  CHECK(coupling_sum(t1, trace.summary.final_x, 0) <= 1.0);
  CHECK(trace.summary.final_cost >= -3.0);
  REQUIRE(trace.summary.k_feasible.has_value());
  CHECK(trace.rows.size() - *trace.summary.k_feasible + 1 >= 50);
  CHECK(trace.summary.settled.has_value());
}

TEST_CASE("stop rule on synthetic rows") {
  const auto feasible_row = [](std::size_t k) {
    TraceRow r;
    r.k = k;
    r.feasible = true;
    r.rho = {1.0};
    return r;
  };
  std::vector<TraceRow> rows;
  const StopRule rule = default_stop_rule(3, 100);
  rows.push_back(feasible_row(1));
  rows.back().feasible = false;
  rows.push_back(feasible_row(2));
  rows.push_back(feasible_row(3));
  CHECK_FALSE(stop_rule_fires(rule, rows));
  rows.push_back(feasible_row(4));
  CHECK(stop_rule_fires(rule, rows));
  rows.back().rho = {2.0};
  CHECK_FALSE(stop_rule_fires(rule, rows));

  const StopRule one = default_stop_rule(1, 100);
  CHECK(stop_rule_fires(one, std::vector<TraceRow>{feasible_row(1)}));
  CHECK_THROWS_AS(default_stop_rule(0, 10), PreconditionError);
}

TEST_CASE("always-infeasible instance runs to the cap") {
  const auto t1 = testing::t1_instance(-1.0);
  const auto trace = run_algorithm1(t1, options_for(t1, 5, 40));
  CHECK(trace.rows.size() == 40);
  CHECK(trace.summary.horizon_exhausted);
  CHECK_FALSE(trace.summary.k_feasible.has_value());
}

TEST_CASE("best-feasible mode on T1") {
  SUBCASE("first iterate already feasible and optimal") {
    const auto t1 = testing::t1_instance(2.0);
    auto o = options_for(t1);
    o.budget = 30;
    const auto trace = run_algorithm2(t1, o);
    REQUIRE(trace.best.has_value());
    CHECK(trace.best->cost == -5.0);
    CHECK(trace.best->found_at == 1);
    CHECK(trace.rows.size() == 30);
  }
  SUBCASE("best cost sequence is nonincreasing and always feasible") {
    const auto t1 = testing::t1_instance();
    auto o = options_for(t1);
    o.budget = 300;
    const auto trace = run_algorithm2(t1, o);
    REQUIRE(trace.best.has_value());
    CHECK(coupling_sum(t1, trace.best->x, 0) <= 1.0);
    CHECK(trace.best->cost >= -3.0);
    std::optional<double> prev;
    for (const auto& row : trace.rows) {
      if (prev) {
        REQUIRE(row.best_cost.has_value());
        CHECK(*row.best_cost <= *prev);
      }
      prev = row.best_cost;
    }
  }
  SUBCASE("no feasible iterate leaves the record empty") {
    const auto t1 = testing::t1_instance(-1.0);
    auto o = options_for(t1);
    o.budget = 50;
    const auto trace = run_algorithm2(t1, o);
    CHECK_FALSE(trace.best.has_value());
    for (const auto& row : trace.rows) CHECK_FALSE(row.best_cost.has_value());
  }
  SUBCASE("budget is required") {
    const auto t1 = testing::t1_instance();
    CHECK_THROWS_AS(run_algorithm2(t1, options_for(t1)), PreconditionError);
  }
}

TEST_CASE("message log carries images only, plus costs in best-feasible mode") {
  const auto t1 = testing::t1_instance();
  auto o = options_for(t1, 50, 25);
  const auto a1 = run_algorithm1(t1, o);
  REQUIRE(a1.messages.size() == a1.rows.size());
  for (const auto& round : a1.messages) {
    REQUIRE(round.size() == 2);
    for (std::size_t i = 0; i < round.size(); ++i) {
      CHECK(round[i].agent_id == i);
      CHECK(round[i].image.size() == 1);
      CHECK_FALSE(round[i].cost.has_value());
    }
  }
  o.budget = 25;
  const auto a2 = run_algorithm2(t1, o);
  for (const auto& round : a2.messages)
    for (const auto& msg : round) CHECK(msg.cost.has_value());
}

TEST_CASE("primal averaging") {
  const std::vector<Vector> constant(4, Vector{0.5, 2.0});
  const Vector alphas{1.0, 0.5, 0.25, 0.125};
  CHECK(primal_average(constant, alphas) == Vector{0.5, 2.0});

  const std::vector<Vector> pair{{9.0}, {0.0}, {1.0}};
  const Vector ones{1.0, 1.0, 1.0};
  CHECK(primal_average(pair, ones) == Vector{0.5});

  CHECK_THROWS_AS(primal_average(std::vector<Vector>{{1.0}}, ones), PreconditionError);
}

TEST_CASE("property: averaged images dominate the running lower envelope") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-3.0, 0.0);
  std::uniform_real_distribution<double> use(0.5, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    CoupledInstance inst;
    inst.name = "avg";
    inst.b = {2.0, 1.5};
    for (std::size_t i = 0; i < 4; ++i)
      inst.agents.push_back(testing::binary_agent(
          i, {coef(rng), coef(rng)}, Matrix{{use(rng), use(rng)}, {use(rng), use(rng)}}));
    auto o = options_for(inst, 20, 300);
    o.record_iterates = true;
    const auto trace = run_algorithm1(inst, o);
    const auto averages = primal_average(trace);
    for (std::size_t i = 0; i < inst.num_agents(); ++i) {
      const Vector image = multiply(inst.agents[i].A, averages[i]);
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(image[j] >= trace.tightening.s_lo[i][j] - 1e-9);
    }
  }
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coef(-3.0, 0.0);
  CoupledInstance inst;
  inst.name = "det";
  inst.b = {2.0};
  for (std::size_t i = 0; i < 5; ++i)
    inst.agents.push_back(testing::binary_agent(i, {coef(rng)}, Matrix{{1.0}}));
  auto o = options_for(inst, 30, 2000);
  const auto a = run_algorithm1(inst, o);
  o.jobs = 3;
  const auto b = run_algorithm1(inst, o);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    CHECK(a.rows[r].lambda == b.rows[r].lambda);
    CHECK(a.rows[r].cost == b.rows[r].cost);
  }
  for (const auto& row : a.rows)
    for (double l : row.lambda) CHECK(l >= 0.0);
}

TEST_CASE("property: rho and gamma are monotone along runs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coef(-3.0, 0.0);
  std::uniform_real_distribution<double> use(0.2, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    CoupledInstance inst;
    inst.name = "mono";
    inst.b = {1.5};
    for (std::size_t i = 0; i < 4; ++i)
      inst.agents.push_back(testing::binary_agent(i, {coef(rng), coef(rng)},
                                                  Matrix{{use(rng), use(rng)}}));
    const auto trace = run_algorithm1(inst, options_for(inst, 30, 2000));
    for (std::size_t r = 1; r < trace.rows.size(); ++r) {
      CHECK(trace.rows[r].gamma >= trace.rows[r - 1].gamma);
      CHECK(trace.rows[r].rho[0] >= trace.rows[r - 1].rho[0]);
    }
    const auto wc = worst_case(inst);
    CHECK(trace.tightening.rho[0] <= wc.rho_tilde[0] + 1e-9);
    CHECK(trace.tightening.gamma <= wc.gamma_tilde + 1e-9);
  }
}

TEST_CASE("dual steps shrink once the tightening has settled") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coef(-3.0, -0.5);
  CoupledInstance inst;
  inst.name = "steps";
  inst.b = {3.0};
  for (std::size_t i = 0; i < 6; ++i)
    inst.agents.push_back(testing::binary_agent(i, {coef(rng)}, Matrix{{1.0}}));
  const auto trace = run_algorithm1(inst, options_for(inst, 100, 5000));
  REQUIRE(trace.rows.size() > 100);
  // |lambda(k+1) - lambda(k)| <= alpha(k) * ||g(k)||, and g is bounded by
  // sum |A_i x_i| + |b| + rho; the tail steps are O(alpha).
  const double g_bound = 6.0 + 3.0 + trace.tightening.rho[0];
  for (std::size_t r = trace.rows.size() - 100; r < trace.rows.size(); ++r) {
    const double step = std::abs(trace.rows[r].lambda[0] - trace.rows[r - 1].lambda[0]);
    CHECK(step <= trace.rows[r].alpha * g_bound + 1e-12);
  }
}
