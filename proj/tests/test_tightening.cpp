#include <doctest.h>

#include "dmilp/tightening.hpp"
#include "support.hpp"

using namespace dmilp;

TEST_CASE("observe follows the envelope updates on T1") {
  auto s = TighteningState::initial(2, 1);
  const std::vector<Vector> both_on{{1.0}, {1.0}};
  const Vector costs_on{-3.0, -2.0};
  s = observe(s, both_on, costs_on);
  CHECK(s.k == 1);
  CHECK(s.s_hi[0] == Vector{1.0});
  CHECK(s.s_lo[1] == Vector{1.0});
  CHECK(s.rho_i[1] == Vector{0.0});
  CHECK(s.rho == Vector{0.0});
  CHECK(s.gamma == 0.0);

  const std::vector<Vector> second_off{{1.0}, {0.0}};
  const Vector costs_off{-3.0, 0.0};
  s = observe(s, second_off, costs_off);
  CHECK(s.s_lo[1] == Vector{0.0});
  CHECK(s.rho_i[1] == Vector{1.0});
  CHECK(s.rho == Vector{1.0});
  CHECK(s.gamma == 2.0);

  const auto again = observe(s, second_off, costs_off);
  CHECK(again.rho == s.rho);
  CHECK(again.gamma == s.gamma);
  CHECK(again.s_hi == s.s_hi);
  CHECK(again.s_lo == s.s_lo);
}

TEST_CASE("rho scales the agent maximum by p") {
  auto s = TighteningState::initial(2, 2);
  const Vector zero_costs{0.0, 0.0};
  s.observe(std::vector<Vector>{{0.0, 1.0}, {2.0, 0.0}}, zero_costs);
  s.observe(std::vector<Vector>{{1.0, 0.0}, {0.0, 0.5}}, zero_costs);
  // rho_1 = (1, 1), rho_2 = (2, 0.5) -> p * max = 2 * (2, 1)
  CHECK(s.rho == Vector{4.0, 2.0});
}

TEST_CASE("observe rejects shape errors") {
  auto s = TighteningState::initial(2, 1);
  const Vector costs{0.0, 0.0};
  CHECK_THROWS_AS(s.observe(std::vector<Vector>{{1.0}}, costs), PreconditionError);
  CHECK_THROWS_AS(s.observe(std::vector<Vector>{{1.0}, {1.0, 2.0}}, costs), PreconditionError);
}

TEST_CASE("worst-case tightening") {
  const auto t1 = worst_case(testing::t1_instance());
  CHECK(t1.rho_tilde == Vector{1.0});
  CHECK(t1.gamma_tilde == 3.0);

  auto zero = testing::t1_instance();
  for (auto& a : zero.agents) a.A = Matrix{{0.0}};
  CHECK(worst_case(zero).rho_tilde == Vector{0.0});

  CoupledInstance single;
  single.name = "single";
  single.b = {5.0};
  auto agent = testing::binary_agent(0, {1.0}, Matrix{{1.0}});
  agent.ub = {2.0};
  single.agents.push_back(agent);
  CHECK(worst_case(single).rho_tilde == Vector{2.0});
  CHECK(worst_case(single, 2).rho_tilde == Vector{2.0});
}

TEST_CASE("settled index") {
  std::vector<TighteningSnapshot> h;
  for (int k = 1; k <= 100; ++k) h.push_back({{k < 5 ? double(k) : 5.0}, 1.0});
  CHECK(settled(h) == 5);

  std::vector<TighteningSnapshot> growing;
  for (int k = 1; k <= 10; ++k) growing.push_back({{double(k)}, 0.0});
  CHECK_FALSE(settled(growing).has_value());

  const std::vector<TighteningSnapshot> single{{{3.0}, 2.0}};
  CHECK(settled(single) == 1);

  std::vector<TighteningSnapshot> gamma_moves(10, {{1.0}, 0.0});
  gamma_moves[6].gamma = gamma_moves[7].gamma = gamma_moves[8].gamma = gamma_moves[9].gamma = 2.0;
  CHECK(settled(gamma_moves) == 7);
  CHECK_FALSE(settled(std::vector<TighteningSnapshot>{}).has_value());
}
