#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>

#include "dmilp/errors.hpp"
#include "dmilp/simplex.hpp"
#include "support.hpp"

using namespace dmilp;

namespace {

LpProblem box_lp(Vector c, Vector lb, Vector ub) {
  LpProblem lp;
  lp.constraints = Matrix(0, c.size());
  lp.objective = std::move(c);
  lp.lb = std::move(lb);
  lp.ub = std::move(ub);
  return lp;
}

}  // namespace

TEST_CASE("bound-attained optimum with no rows") {
  const auto r = solve_lp(box_lp({-1.0}, {0.0}, {1.0}));
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.value == doctest::Approx(-1.0));
  CHECK(r.is_vertex);
}

TEST_CASE("cut simplex optimum resolves to (1,0)") {
  auto lp = box_lp({-1.0, -1.0}, {0.0, 0.0}, {1.0, 1.0});
  lp.constraints = Matrix{{1.0, 1.0}};
  lp.rhs = {1.0};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(-1.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("contradictory row is infeasible") {
  auto lp = box_lp({1.0}, {0.0}, {1.0});
  lp.constraints = Matrix{{1.0}};
  lp.rhs = {-1.0};
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("phase one handles rows violated at the lower bounds") {
  // x + y >= 1.5 written as -x - y <= -1.5.
  auto lp = box_lp({1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0});
  lp.constraints = Matrix{{-1.0, -1.0}};
  lp.rhs = {-1.5};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("fixed variables and negative bounds") {
  auto lp = box_lp({1.0, -1.0}, {-2.0, 3.0}, {-1.0, 3.0});
  lp.constraints = Matrix{{1.0, 1.0}};
  lp.rhs = {10.0};
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(-2.0));
  CHECK(r.x[1] == doctest::Approx(3.0));
}

TEST_CASE("infinite bounds are a precondition error") {
  auto lp = box_lp({1.0}, {0.0}, {std::numeric_limits<double>::infinity()});
  CHECK_THROWS_AS(solve_lp(lp), PreconditionError);
}

TEST_CASE("enumerate_vertices on small polytopes") {
  auto square = box_lp({0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0});
  const std::vector<Vector> corners{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(enumerate_vertices(square) == corners);

  square.constraints = Matrix{{1.0, 1.0}};
  square.rhs = {1.0};
  const std::vector<Vector> triangle{{0, 0}, {0, 1}, {1, 0}};
  CHECK(enumerate_vertices(square) == triangle);

  square.rhs = {-1.0};
  CHECK(enumerate_vertices(square).empty());

  const auto big = box_lp(Vector(13, 0.0), Vector(13, 0.0), Vector(13, 1.0));
  CHECK_THROWS_AS(enumerate_vertices(big), DimensionTooLarge);
}

TEST_CASE("property: simplex value equals the best enumerated vertex") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  int optimal = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto lp = testing::random_lp(rng, dim(rng), dim(rng));
    const auto r = solve_lp(lp);
    const auto vertices = enumerate_vertices(lp);
    if (vertices.empty()) {
      CHECK(r.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(r.status == LpStatus::Optimal);
    ++optimal;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) best = std::min(best, dot(lp.objective, v));
    CHECK(r.value == doctest::Approx(best).epsilon(0).scale(1).epsilon(1e-7));
    CHECK(lp_feasible(lp, r.x, 1e-8));
    // Basic solutions coincide with a vertex of the polytope.
    const bool on_vertex = std::any_of(vertices.begin(), vertices.end(), [&](const Vector& v) {
      for (std::size_t j = 0; j < v.size(); ++j)
        if (std::abs(v[j] - r.x[j]) > 1e-6) return false;
      return true;
    });
    CHECK(on_vertex);
  }
  CHECK(optimal > 100);
}

TEST_CASE("property: solves are bit-identical") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lp = testing::random_lp(rng, 5, 4);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.x.size() == b.x.size());
    CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("degenerate assignment polytope terminates") {
  // 3x3 assignment LP: heavily degenerate, exercises the cycling guard.
  const std::size_t k = 3;
  LpProblem lp;
  lp.lb.assign(k * k, 0.0);
  lp.ub.assign(k * k, 1.0);
  const double cost[9] = {4, 1, 3, 2, 0, 5, 3, 2, 2};
  lp.objective.assign(cost, cost + 9);
  lp.constraints = Matrix(0, k * k);
  for (std::size_t i = 0; i < k; ++i) {
    Vector row(k * k, 0.0), col(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      row[i * k + j] = 1.0;
      col[j * k + i] = 1.0;
    }
    Vector neg_row = row, neg_col = col;
    for (double& v : neg_row) v = -v;
    for (double& v : neg_col) v = -v;
    lp.constraints.append_row(row);
    lp.rhs.push_back(1.0);
    lp.constraints.append_row(neg_row);
    lp.rhs.push_back(-1.0);
    lp.constraints.append_row(col);
    lp.rhs.push_back(1.0);
    lp.constraints.append_row(neg_col);
    lp.rhs.push_back(-1.0);
  }
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  // Hungarian optimum: (0,1) + (1,0) + (2,2) = 1 + 2 + 2.
  CHECK(r.value == doctest::Approx(5.0));
}
