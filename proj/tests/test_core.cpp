#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "evrp/instance.hpp"
#include "evrp/simulate.hpp"
#include "oracles.hpp"

using namespace evrp;
using testutil::line_instance;
using testutil::make_route;

TEST_CASE("travel legs are euclidean and scale with speed and consumption") {
  Depot depot{0.0, 0.0};
  std::vector<Customer> customers{{1, 3.0, 4.0, 10.0, 0.0, 0.0, 100.0}};
  Fleet fleet;
  fleet.size = 1;

  SUBCASE("unit speed and consumption") {
    Instance inst(depot, customers, {}, fleet, {}, 1000.0);
    const Leg leg = inst.travel(0, 1);
    CHECK(leg.distance == doctest::Approx(5.0));
    CHECK(leg.time == doctest::Approx(5.0));
    CHECK(leg.energy == doctest::Approx(5.0));
    const Leg back = travel(inst, 1, 0);
    CHECK(back.distance == doctest::Approx(leg.distance));
  }
  SUBCASE("speed 2, consumption 0.5") {
    fleet.speed = 2.0;
    fleet.consumption_rate = 0.5;
    Instance inst(depot, customers, {}, fleet, {}, 1000.0);
    const Leg leg = inst.travel(0, 1);
    CHECK(leg.distance == doctest::Approx(5.0));
    CHECK(leg.time == doctest::Approx(2.5));
    CHECK(leg.energy == doctest::Approx(2.5));
  }
}

TEST_CASE("instance construction rejects broken input") {
  Depot depot{0.0, 0.0};
  Fleet fleet;
  std::vector<Customer> ok{{1, 1.0, 1.0, 5.0, 0.0, 0.0, 50.0}};

  CHECK_THROWS_AS(Instance(depot, {{0, 1, 1, 5, 0, 0, 50}}, {}, fleet, {}, 100),
                  std::invalid_argument);  // id 0 is the depot
  CHECK_THROWS_AS(
      Instance(depot, {{1, 1, 1, 5, 0, 0, 50}, {1, 2, 2, 5, 0, 0, 50}}, {},
               fleet, {}, 100),
      std::invalid_argument);  // duplicate id
  CHECK_THROWS_AS(Instance(depot, {{1, 1, 1, -5, 0, 0, 50}}, {}, fleet, {}, 100),
                  std::invalid_argument);  // nonpositive demand
  CHECK_THROWS_AS(Instance(depot, {{1, 1, 1, 5, 0, 60, 50}}, {}, fleet, {}, 100),
                  std::invalid_argument);  // window closes before it opens
  CHECK_THROWS_AS(Instance(depot, ok, {{1, 0, 0, 0, 50}}, fleet, {}, 100),
                  std::invalid_argument);  // station id collides with customer
  CHECK_THROWS_AS(Instance(depot, ok, {{2, 0, 0, 60, 50}}, fleet, {}, 100),
                  std::invalid_argument);  // grid window inverted
  fleet.battery = 0.0;
  CHECK_THROWS_AS(Instance(depot, ok, {}, fleet, {}, 100),
                  std::invalid_argument);  // dead battery

  Fleet good;
  Instance inst(depot, ok, {{2, 0.0, 1.0, 10.0, 50.0}}, good, {}, 100.0);
  CHECK(inst.has_node(0));
  CHECK(inst.kind(1) == NodeKind::customer);
  CHECK(inst.kind(2) == NodeKind::station);
  CHECK_FALSE(inst.has_node(9));
  CHECK_THROWS_AS(inst.customer(9), std::out_of_range);
  CHECK(inst.diagonal_energy() == doctest::Approx(std::hypot(1.0, 1.0)));
}

TEST_CASE("single customer out-and-back timeline") {
  // Customer 10 units east, 10 units of service, battery 200.
  Instance inst = line_instance({10.0});
  SimOutcome sim = simulate_route(inst, make_route({1}));
  REQUIRE(sim.ok());
  const Schedule& s = sim.schedule;
  REQUIRE(s.visits.size() == 1);
  CHECK(s.initial_load == doctest::Approx(10.0));
  CHECK(s.visits[0].arrival == doctest::Approx(10.0));
  CHECK(s.visits[0].wait == doctest::Approx(0.0));
  CHECK(s.visits[0].service_start == doctest::Approx(10.0));
  CHECK(s.visits[0].departure == doctest::Approx(20.0));
  CHECK(s.visits[0].soc_on_arrival == doctest::Approx(190.0));
  CHECK(s.visits[0].load_on_arrival == doctest::Approx(10.0));
  CHECK(s.distance == doctest::Approx(20.0));
  CHECK(s.return_time == doctest::Approx(30.0));
  CHECK(s.return_soc == doctest::Approx(180.0));
  CHECK(s.min_soc == doctest::Approx(180.0));
}

TEST_CASE("early arrival waits for the window to open") {
  Instance inst = line_instance({10.0}, {}, 10.0, 10.0, 50.0, 200.0);
  SimOutcome sim = simulate_route(inst, make_route({1}));
  REQUIRE(sim.ok());
  CHECK(sim.schedule.visits[0].wait == doctest::Approx(40.0));
  CHECK(sim.schedule.visits[0].service_start == doctest::Approx(50.0));
  CHECK(sim.schedule.return_time == doctest::Approx(70.0));
}

TEST_CASE("each hard constraint trips its own violation") {
  SUBCASE("customer window") {
    Instance inst = line_instance({10.0}, {}, 10.0, 10.0, 0.0, 5.0);
    SimOutcome sim = simulate_route(inst, make_route({1}));
    REQUIRE_FALSE(sim.ok());
    CHECK(sim.violation->kind == ViolationKind::customer_window);
    CHECK(sim.violation->visit_index == 0);
    CHECK(sim.violation->node_id == 1);
  }
  SUBCASE("capacity, flagged before departure") {
    Instance inst = line_instance({10.0}, {}, 250.0);
    SimOutcome sim = simulate_route(inst, make_route({1}));
    REQUIRE_FALSE(sim.ok());
    CHECK(sim.violation->kind == ViolationKind::capacity);
    CHECK(sim.violation->visit_index == 0);
  }
  SUBCASE("battery dies on the return leg") {
    Fleet fleet;
    fleet.battery = 15.0;
    Instance inst = line_instance({10.0}, {}, 10, 10, 0, 200, 1000, fleet);
    SimOutcome sim = simulate_route(inst, make_route({1}));
    REQUIRE_FALSE(sim.ok());
    CHECK(sim.violation->kind == ViolationKind::battery);
    CHECK(sim.violation->visit_index == 1);  // one past the last visit
    CHECK(sim.violation->node_id == Instance::kDepotId);

    SimOutcome relaxed = simulate_route_relaxed(inst, make_route({1}));
    CHECK(relaxed.ok());
    CHECK(relaxed.schedule.return_soc == doctest::Approx(-5.0));
    CHECK(relaxed.schedule.min_soc == doctest::Approx(-5.0));
  }
  SUBCASE("horizon cut on return") {
    Instance inst = line_instance({10.0}, {}, 10, 10, 0, 20, 25.0);
    SimOutcome sim = simulate_route(inst, make_route({1}));
    REQUIRE_FALSE(sim.ok());
    CHECK(sim.violation->kind == ViolationKind::horizon);
    CHECK(sim.violation->visit_index == 1);
  }
  SUBCASE("grid window bounds discharge end") {
    Instance inst = line_instance({10.0}, {{0, 20.0, 0.0, 0.0, 30.0}});
    Route r = make_route({1, 2});
    r.visits[1].discharge = 15.0;  // arrive 30, 30 + 15 > 30
    SimOutcome sim = simulate_route(inst, r);
    REQUIRE_FALSE(sim.ok());
    CHECK(sim.violation->kind == ViolationKind::grid_window);
    CHECK(sim.violation->node_id == 2);
  }
}

TEST_CASE("station visits wait for the grid window and meter energy") {
  // Station 20 east with peak [40, 100], discharge rate 2.
  Fleet fleet;
  fleet.discharge_rate = 2.0;
  Instance inst =
      line_instance({10.0}, {{0, 20.0, 0.0, 40.0, 100.0}}, 10, 10, 0, 200,
                    1000, fleet);
  Route r = make_route({1, 2});
  r.visits[1].discharge = 5.0;
  SimOutcome sim = simulate_route(inst, r);
  REQUIRE(sim.ok());
  const Schedule& s = sim.schedule;
  CHECK(s.visits[1].arrival == doctest::Approx(30.0));
  CHECK(s.visits[1].wait == doctest::Approx(10.0));
  CHECK(s.visits[1].service_start == doctest::Approx(40.0));
  CHECK(s.visits[1].departure == doctest::Approx(45.0));
  CHECK(s.energy_discharged == doctest::Approx(10.0));  // rate 2 for 5 units
  CHECK(s.discharge_time == doctest::Approx(5.0));
  CHECK(s.return_soc == doctest::Approx(200.0 - 40.0 - 10.0));
  CHECK(s.return_time == doctest::Approx(65.0));
}

TEST_CASE("malformed routes throw instead of reporting violations") {
  Instance inst = line_instance({10.0, 20.0});
  CHECK_THROWS_AS(simulate_route(inst, make_route({1, 1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_route(inst, make_route({7})),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_route(inst, make_route({0, 1})),
                  std::invalid_argument);
  Route bad = make_route({1});
  bad.visits[0].discharge = 3.0;  // discharging at a customer
  CHECK_THROWS_AS(simulate_route(inst, bad), std::invalid_argument);
  bad.visits[0].discharge = -1.0;
  CHECK_THROWS_AS(simulate_route(inst, bad), std::invalid_argument);
}

TEST_CASE("check_solution covers coverage and per-route constraints") {
  Instance inst = line_instance({10.0, 20.0});

  SUBCASE("feasible two-route plan is clean") {
    Solution sol{{make_route({1}), make_route({2})}, {}};
    CHECK(check_solution(inst, sol).empty());
  }
  SUBCASE("missing customer is reported") {
    Solution sol{{make_route({1})}, {}};
    auto v = check_solution(inst, sol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::missing_customer);
    CHECK(v[0].node_id == 2);
  }
  SUBCASE("duplicate across routes is reported once") {
    Solution sol{{make_route({1, 2}), make_route({1})}, {}};
    auto v = check_solution(inst, sol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::duplicate_visit);
    CHECK(v[0].route_index == 1);
  }
  SUBCASE("unknown node and bad discharge are malformed, not simulated") {
    Solution sol{{make_route({1, 9}), make_route({2})}, {}};
    auto v = check_solution(inst, sol);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::unknown_node);

    Solution sol2{{make_route({1}), make_route({2})}, {}};
    sol2.routes[0].visits[0].discharge = 1.0;
    auto v2 = check_solution(inst, sol2);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].kind == ViolationKind::malformed_route);
  }
  SUBCASE("route constraint failures carry the route index") {
    Instance tight = line_instance({10.0, 20.0}, {}, 10.0, 10.0, 0.0, 5.0);
    Solution sol{{make_route({1}), make_route({2})}, {}};
    auto v = check_solution(tight, sol);
    REQUIRE(v.size() == 2);
    CHECK(v[0].kind == ViolationKind::customer_window);
    CHECK(v[0].route_index == 0);
    CHECK(v[1].route_index == 1);
  }
}

TEST_CASE("objective arithmetic matches hand-checked reference rows") {
  const CostWeights w;
  // d = 214.56, 3 vehicles, 180 units of discharge time.
  CHECK(evaluate_cost(214.56, 3, 180.0, w) ==
        doctest::Approx(268.421424).epsilon(1e-12));
  CHECK(evaluate_cost(214.56, 3, 180.0, w) == doctest::Approx(268.42).epsilon(2e-4));
  // d = 218.60, 2 vehicles, 90 units.
  CHECK(evaluate_cost(218.60, 2, 90.0, w) ==
        doctest::Approx(189.05644).epsilon(1e-12));
  // Energy column form: 180 energy at rate 2 is 90 time units.
  CHECK(evaluate_cost_from_energy(218.60, 2, 180.0, 2.0, w) ==
        doctest::Approx(evaluate_cost(218.60, 2, 90.0, w)).epsilon(1e-12));

  Metrics m;
  m.distance = 214.56;
  m.vehicles = 3;
  m.discharge_time = 180.0;
  CHECK(evaluate_cost(m, w) == doctest::Approx(268.421424).epsilon(1e-12));
}

TEST_CASE("compute_metrics aggregates routes and skips empty ones") {
  Instance inst = line_instance({10.0, 20.0});
  Solution sol{{make_route({1}), Route{}, make_route({2})}, {}};
  Metrics m = compute_metrics(inst, sol);
  CHECK(m.vehicles == 2);
  CHECK(m.distance == doctest::Approx(60.0));
  CHECK(m.energy_discharged == doctest::Approx(0.0));
  CHECK(m.cost ==
        doctest::Approx(evaluate_cost(60.0, 2, 0.0, inst.weights())));
}

TEST_CASE("plan_extension screens match the simulator") {
  SUBCASE("window close is inclusive") {
    Instance inst = line_instance({10.0}, {}, 10, 10, 0.0, 10.0);
    auto plan = plan_extension(inst, initial_state(inst), 1);
    REQUIRE(plan.has_value());  // service starts exactly at close
    CHECK(plan->service_start == doctest::Approx(10.0));
    Instance tighter = line_instance({10.0}, {}, 10, 10, 0.0, 9.5);
    CHECK_FALSE(plan_extension(tighter, initial_state(tighter), 1));
  }
  SUBCASE("demand screen") {
    Instance inst = line_instance({10.0}, {}, 250.0);
    CHECK_FALSE(plan_extension(inst, initial_state(inst), 1));
  }
  SUBCASE("round trip energy screen") {
    Fleet fleet;
    fleet.battery = 19.0;
    Instance inst = line_instance({10.0}, {}, 10, 10, 0, 200, 1000, fleet);
    CHECK_FALSE(plan_extension(inst, initial_state(inst), 1));
    fleet.battery = 20.0;
    Instance just = line_instance({10.0}, {}, 10, 10, 0, 200, 1000, fleet);
    CHECK(plan_extension(just, initial_state(just), 1).has_value());
  }
  SUBCASE("return horizon screen") {
    Instance inst = line_instance({10.0}, {}, 10, 10, 0, 25, 29.0);
    CHECK_FALSE(plan_extension(inst, initial_state(inst), 1));
    Instance just = line_instance({10.0}, {}, 10, 10, 0, 25, 30.0);
    CHECK(plan_extension(just, initial_state(just), 1).has_value());
  }
  SUBCASE("stations need strictly positive discharge room") {
    // Grid window closed before arrival: no reason to stop.
    Instance inst = line_instance({}, {{0, 10.0, 0.0, 0.0, 8.0}});
    CHECK_FALSE(plan_extension(inst, initial_state(inst), 1));
    Instance open = line_instance({}, {{0, 10.0, 0.0, 0.0, 50.0}});
    auto plan = plan_extension(open, initial_state(open), 1);
    REQUIRE(plan.has_value());
    // Caps: window 40, charge (200 - 20) / 1 = 180, horizon 1000 - 10 - 10.
    CHECK(plan->gamma_max == doctest::Approx(40.0));
  }
  SUBCASE("station discharge capped by remaining charge") {
    Fleet fleet;
    fleet.battery = 30.0;
    Instance inst =
        line_instance({}, {{0, 10.0, 0.0, 0.0, 500.0}}, 10, 10, 0, 200, 1000,
                      fleet);
    auto plan = plan_extension(inst, initial_state(inst), 1);
    REQUIRE(plan.has_value());
    CHECK(plan->gamma_max == doctest::Approx(10.0));  // 30 - 2 legs of 10
  }
}

TEST_CASE("state_after_prefix is consistent with the simulator") {
  Instance inst =
      line_instance({10.0, 30.0}, {{0, 20.0, 0.0, 0.0, 300.0}});
  Route r = make_route({1, 3, 2});  // customer, station, customer
  r.visits[1].discharge = 7.0;
  SimOutcome sim = simulate_route(inst, r);
  REQUIRE(sim.ok());
  for (std::size_t n = 1; n <= r.visits.size(); ++n) {
    RouteState st = state_after_prefix(inst, r, n);
    CHECK(st.position == r.visits[n - 1].node);
    CHECK(st.ready == doctest::Approx(sim.schedule.visits[n - 1].departure));
  }
  RouteState full = state_after_prefix(inst, r, r.visits.size());
  const Leg home = inst.travel(2, 0);
  CHECK(full.soc - home.energy == doctest::Approx(sim.schedule.return_soc));
  CHECK(full.load == doctest::Approx(inst.capacity() - 20.0));
}
