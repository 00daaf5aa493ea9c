#include <doctest.h>

#include <random>

#include "dmilp/certificates.hpp"
#include "support.hpp"

using namespace dmilp;

namespace {

RunOptions options_for(const CoupledInstance& inst, std::size_t window = 50) {
  RunOptions o;
  o.schedule = StepSchedule::default_for(inst);
  o.stop = default_stop_rule(window, 10'000);
  return o;
}

}  // namespace

TEST_CASE("Slater margin on T1") {
  const auto zero = slater_margin(testing::t1_instance(), {0.0});
  REQUIRE(zero.has_value());
  CHECK(zero->zeta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(zero->x == std::vector<Vector>{{0.0}, {0.0}});

  CHECK_FALSE(slater_margin(testing::t1_instance(), {1.0}).has_value());

  const auto wide = slater_margin(testing::t1_instance(100.0), {0.0});
  REQUIRE(wide.has_value());
  CHECK(wide->zeta == doctest::Approx(50.0).epsilon(1e-12));

  CHECK_THROWS_AS(slater_margin(testing::t1_instance(), {-1.0}), PreconditionError);
}

TEST_CASE("performance bound evaluation") {
  CHECK(performance_bound(2.0, 1.0, 1, 1.0, 3.0) == 5.0);
  CHECK(performance_bound(0.0, 0.0, 3, 0.25, 7.0) == 0.0);
  CHECK_THROWS_AS(performance_bound(1.0, 1.0, 1, 0.0, 1.0), PreconditionError);
}

TEST_CASE("certificate for the T1 run") {
  const auto t1 = testing::t1_instance();
  const auto run = run_algorithm1(t1, options_for(t1));
  const auto cert = build_certificate(run, t1, -3.0);
  CHECK(cert.rho_bar == Vector{1.0});
  CHECK(cert.rho_tilde == Vector{1.0});
  CHECK(cert.gamma_tilde == 3.0);
  CHECK_FALSE(cert.zeta.has_value());
  CHECK_FALSE(cert.bound_new.has_value());
  CHECK_FALSE(cert.bound_absent_reason.empty());
  REQUIRE(cert.achieved_gap.has_value());
  CHECK(*cert.achieved_gap == run.summary.final_cost + 3.0);
  CHECK(cert.assumptions_unverified);
}

TEST_CASE("certificate with zero tightening") {
  const auto t1 = testing::t1_instance(2.0);
  const auto run = run_algorithm1(t1, options_for(t1));
  const auto cert = build_certificate(run, t1, -5.0);
  CHECK(cert.rho_bar == Vector{0.0});
  REQUIRE(cert.bound_new.has_value());
  CHECK(*cert.bound_new == 0.0);
  CHECK(*cert.achieved_gap == 0.0);
}

TEST_CASE("certificate requires a settled run") {
  const auto t1 = testing::t1_instance();
  RunTrace empty;
  CHECK_THROWS_AS(build_certificate(empty, t1, std::nullopt), NotSettled);
}

TEST_CASE("baseline recovery") {
  SUBCASE("T1 recovers a coupling-feasible point") {
    const auto t1 = testing::t1_instance();
    const auto res = baseline_recover(t1, options_for(t1));
    CHECK(res.rho_tilde == Vector{1.0});
    CHECK(res.feasible);
    CHECK(res.x[0][0] + res.x[1][0] <= 1.0);
    CHECK(res.trace.mode == RunMode::Baseline);
  }
  SUBCASE("empty tightened relaxation") {
    const auto t1 = testing::t1_instance(0.0);
    CHECK_THROWS_AS(baseline_recover(t1, options_for(t1)), BaselineInfeasible);
  }
  SUBCASE("no coupling") {
    auto inst = testing::t1_instance();
    for (auto& a : inst.agents) a.A = Matrix{{0.0}};
    const auto res = baseline_recover(inst, options_for(inst));
    CHECK(res.rho_tilde == Vector{0.0});
    CHECK(res.lambda == Vector{0.0});
    CHECK(res.x == std::vector<Vector>{{1.0}, {1.0}});
    CHECK(res.cost == -5.0);
  }
}

TEST_CASE("property: achieved gap within the bound, bound within the baseline bound") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-4.0, 0.0);
  std::uniform_real_distribution<double> use(0.2, 1.5);
  int certified = 0;
  for (int trial = 0; trial < 20; ++trial) {
    CoupledInstance inst;
    inst.name = "cert";
    inst.b = {3.0};
    for (std::size_t i = 0; i < 4; ++i)
      inst.agents.push_back(testing::binary_agent(i, {coef(rng), coef(rng)},
                                                  Matrix{{use(rng), use(rng)}}));
    const auto run = run_algorithm1(inst, options_for(inst));
    if (!run.summary.settled) continue;
    const double optimum = solve_monolithic(inst).value;
    const auto cert = build_certificate(run, inst, optimum);
    CHECK(*cert.achieved_gap >= -1e-9);
    if (cert.bound_new) {
      ++certified;
      CHECK(*cert.achieved_gap <= *cert.bound_new + 1e-6);
      const double common = *cert.zeta;
      CHECK(performance_bound(cert.gamma_bar, norm_inf(cert.rho_bar), 1, common, cert.gamma_tilde) <=
            performance_bound(cert.gamma_tilde, norm_inf(cert.rho_tilde), 1, common,
                              cert.gamma_tilde) + 1e-7);
    }
  }
  CHECK(certified > 0);
}
