#include <doctest.h>

#include <cmath>

#include "evrp/exact.hpp"
#include "evrp/simulate.hpp"
#include "oracles.hpp"

using namespace evrp;
using testutil::line_instance;

TEST_CASE("one customer, one vehicle: closed-form optimum") {
  Fleet fleet;
  fleet.size = 1;
  Instance inst = line_instance({10.0}, {}, 10, 10, 0, 200, 1000, fleet);
  ExactResult r = solve_exact(inst);
  REQUIRE(r.solution.has_value());
  CHECK(r.proven_optimal);
  CHECK(r.nodes_expanded > 0);
  const CostWeights& w = inst.weights();
  CHECK(r.solution->metrics.cost ==
        doctest::Approx(w.per_vehicle + w.per_distance * 20.0).epsilon(1e-12));
  CHECK(r.bound_at_exit == doctest::Approx(r.solution->metrics.cost));
  CHECK(check_solution(inst, *r.solution).empty());

  auto brute = enumerate_all(inst);
  REQUIRE(brute.has_value());
  CHECK(brute->metrics.cost == r.solution->metrics.cost);
}

TEST_CASE("single-route chain dominates: both searches find it") {
  // Three customers in a tight line; one vehicle pass is clearly cheapest.
  Instance inst = line_instance({10.0, 20.0, 30.0});
  ExactResult r = solve_exact(inst);
  REQUIRE(r.solution.has_value());
  CHECK(r.proven_optimal);
  CHECK(r.solution->routes.size() == 1);
  auto brute = enumerate_all(inst);
  REQUIRE(brute.has_value());
  CHECK(r.solution->metrics.cost == brute->metrics.cost);
  CHECK(r.solution->routes == brute->routes);
}

TEST_CASE("a profitable station is taken, an unprofitable one is not") {
  SUBCASE("discharge revenue beats the detour") {
    // Station 5 east of the lone customer: detour 10, window allows ~155
    // units of discharge, and 0.2478 * 155 far exceeds 0.0354 * 10.
    Instance inst =
        line_instance({10.0}, {{0, 15.0, 0.0, 0.0, 180.0}}, 10, 10, 0, 180,
                      400.0);
    ExactResult r = solve_exact(inst);
    REQUIRE(r.solution.has_value());
    REQUIRE(r.solution->routes.size() == 1);
    bool visited_station = false;
    for (const Visit& v : r.solution->routes[0].visits)
      if (v.node == 2) {
        visited_station = true;
        CHECK(v.discharge > 0.0);
      }
    CHECK(visited_station);
    auto brute = enumerate_all(inst);
    REQUIRE(brute.has_value());
    CHECK(r.solution->metrics.cost == brute->metrics.cost);
  }
  SUBCASE("narrow window is not worth the trip") {
    // Station far off axis with 2 time units of peak: revenue under 0.5,
    // detour cost over 2.
    Instance inst =
        line_instance({10.0}, {{0, 40.0, 30.0, 100.0, 102.0}}, 10, 10, 0, 180,
                      400.0);
    ExactResult r = solve_exact(inst);
    REQUIRE(r.solution.has_value());
    for (const Route& route : r.solution->routes)
      for (const Visit& v : route.visits) CHECK(v.node != 2);
    auto brute = enumerate_all(inst);
    CHECK(r.solution->metrics.cost == brute->metrics.cost);
  }
}

TEST_CASE("zero customers solve to an empty plan") {
  Instance inst = line_instance({}, {{0, 10.0, 0.0, 0.0, 50.0}});
  ExactResult r = solve_exact(inst);
  REQUIRE(r.solution.has_value());
  CHECK(r.solution->routes.empty());
  CHECK(r.solution->metrics.cost == 0.0);
  CHECK(r.proven_optimal);
  auto brute = enumerate_all(inst);
  REQUIRE(brute.has_value());
  CHECK(brute->routes.empty());
}

TEST_CASE("infeasible instances are proven infeasible") {
  // Customer window closes before any vehicle can arrive.
  Depot depot{0.0, 0.0};
  std::vector<Customer> customers{{1, 50.0, 0.0, 10.0, 0.0, 0.0, 20.0}};
  Fleet fleet;
  fleet.size = 2;
  Instance inst(depot, customers, {}, fleet, {}, 1000.0);
  ExactResult r = solve_exact(inst);
  CHECK_FALSE(r.solution.has_value());
  CHECK(r.proven_optimal);
  CHECK(std::isinf(r.bound_at_exit));
  CHECK_FALSE(enumerate_all(inst).has_value());
}

TEST_CASE("brute force guard rejects oversized instances") {
  Instance inst = line_instance({1, 2, 3, 4, 5, 6, 7});
  CHECK_THROWS_AS(enumerate_all(inst), std::invalid_argument);
}

TEST_CASE("search equals brute force on random tiny instances") {
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    Instance inst = testutil::tiny_instance(seed, 5, 2, 2);
    ExactResult r = solve_exact(inst);
    REQUIRE(r.proven_optimal);
    auto brute = enumerate_all(inst);
    REQUIRE(r.solution.has_value() == brute.has_value());
    if (!brute) continue;
    ++feasible;
    // Bitwise equality: both searches resolve ties to the same plan.
    CHECK(r.solution->metrics.cost == brute->metrics.cost);
    CHECK(r.solution->routes == brute->routes);
    CHECK(check_solution(inst, *r.solution).empty());
    CHECK(check_solution(inst, *brute).empty());
    CHECK(int(r.solution->routes.size()) <= inst.fleet_size());
  }
  CHECK(feasible >= 40);
}

TEST_CASE("pruning changes work, never answers") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    Instance inst = testutil::tiny_instance(seed, 4, 2, 2);
    SearchLimits with;
    SearchLimits without;
    without.use_lower_bound = false;
    ExactResult a = solve_exact(inst, with);
    ExactResult b = solve_exact(inst, without);
    REQUIRE(a.solution.has_value() == b.solution.has_value());
    if (a.solution) {
      CHECK(a.solution->metrics.cost == b.solution->metrics.cost);
      CHECK(a.solution->routes == b.solution->routes);
    }
    CHECK(a.nodes_expanded <= b.nodes_expanded);
  }
}

TEST_CASE("budget exhaustion degrades gracefully") {
  Instance inst = testutil::tiny_instance(7, 5, 2, 2);
  ExactResult full = solve_exact(inst);
  REQUIRE(full.solution.has_value());

  SearchLimits starve;
  starve.max_nodes_expanded = 40;
  ExactResult r = solve_exact(inst, starve);
  CHECK_FALSE(r.proven_optimal);
  CHECK(r.bound_at_exit <= full.solution->metrics.cost + 1e-9);
  if (r.solution) {
    CHECK(r.solution->metrics.cost >= full.solution->metrics.cost - 1e-9);
    CHECK(check_solution(inst, *r.solution).empty());
  }
}
