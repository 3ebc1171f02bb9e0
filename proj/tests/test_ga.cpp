#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "evrp/exact.hpp"
#include "evrp/ga.hpp"
#include "evrp/insertion.hpp"
#include "evrp/simulate.hpp"
#include "oracles.hpp"

using namespace evrp;
using testutil::line_instance;
using testutil::make_route;
using testutil::random_greedy_solution;
using testutil::tiny_instance;

namespace {

// Parents for operator tests: randomized construction polished into the
// population invariant (discharge optimal, stations saturated, no empty
// routes).
Chromosome stable_parent(const Instance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Solution sol = random_greedy_solution(inst, rng);
  return make_chromosome(inst, improve_insertion(inst, sol));
}

std::set<std::pair<int, int>> arcs_of(const Solution& s) {
  std::set<std::pair<int, int>> arcs;
  for (const Route& r : s.routes) {
    if (r.empty()) continue;
    int prev = 0;
    for (const Visit& v : r.visits) {
      arcs.insert({prev, v.node});
      prev = v.node;
    }
    arcs.insert({prev, 0});
  }
  return arcs;
}

std::map<int, int> customer_route_index(const Instance& inst,
                                        const Solution& s) {
  std::map<int, int> where;
  int idx = 0;
  for (const Route& r : s.routes) {
    if (r.empty()) continue;
    for (const Visit& v : r.visits)
      if (inst.kind(v.node) == NodeKind::customer) where[v.node] = idx;
    ++idx;
  }
  return where;
}

Chromosome synthetic(double fit) {
  Chromosome ch;
  ch.fitness = fit;
  return ch;
}

}  // namespace

TEST_CASE("fitness equals the objective cost on feasible plans") {
  for (std::uint64_t seed : {1, 4, 9, 16, 25}) {
    const Instance inst = tiny_instance(seed);
    std::mt19937_64 rng(seed * 7 + 1);
    const Solution sol = random_greedy_solution(inst, rng);
    const Metrics m = compute_metrics(inst, sol);
    CHECK(fitness(inst, sol) == m.cost);  // bitwise: same accumulation
  }
}

TEST_CASE("fitness prices battery shortfall at 1000 per distance unit") {
  // Round trip of 60 on a 40-unit battery: the trip ends 20 below empty.
  Fleet fleet;
  fleet.battery = 40.0;
  const Instance inst = line_instance({30.0}, {}, 10.0, 10.0, 0.0, 200.0,
                                      1000.0, fleet);
  Solution sol;
  sol.routes.push_back(make_route({1}));

  const double clean = evaluate_cost(60.0, 1, 0.0, inst.weights());
  CHECK(fitness(inst, sol) == clean + 1000.0 * 60.0 * 20.0);

  const Chromosome ch = make_chromosome(inst, sol);
  CHECK(ch.charge_penalty == 20.0);
  CHECK(ch.fitness == clean + 1000.0 * 60.0 * 20.0);
  CHECK(ch.solution.metrics.distance == 60.0);
}

TEST_CASE("fitness is infinite on violations other than battery") {
  // Customer window closes before the vehicle can arrive.
  const Instance inst = line_instance({30.0}, {}, 10.0, 10.0, 0.0, 10.0);
  Solution sol;
  sol.routes.push_back(make_route({1}));
  CHECK(std::isinf(fitness(inst, sol)));
  CHECK(std::isinf(make_chromosome(inst, sol).fitness));
}

TEST_CASE("binary tournament semantics") {
  std::mt19937_64 rng(99);

  SUBCASE("empty population is rejected") {
    const std::vector<Chromosome> none;
    CHECK_THROWS_AS(select_parent(none, rng), std::invalid_argument);
  }

  SUBCASE("single member always wins") {
    std::vector<Chromosome> one;
    one.push_back(synthetic(3.5));
    for (int i = 0; i < 20; ++i)
      CHECK(&select_parent(one, rng) == &one[0]);
  }

  SUBCASE("the weaker of two wins only when drawn twice") {
    // P(return weak) = P(both draws weak) = 1/4.
    std::vector<Chromosome> two;
    two.push_back(synthetic(5.0));
    two.push_back(synthetic(9.0));
    int weak = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i)
      if (&select_parent(two, rng) == &two[1]) ++weak;
    CHECK(weak > n / 4 - 400);  // ~4.6 sigma
    CHECK(weak < n / 4 + 400);
  }

  SUBCASE("equal fitness falls back to the first draw, uniformly") {
    std::vector<Chromosome> five;
    for (int i = 0; i < 5; ++i) five.push_back(synthetic(1.0));
    std::vector<int> hits(5, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i)
      ++hits[std::size_t(&select_parent(five, rng) - five.data())];
    for (int h : hits) {
      CHECK(h > n / 5 - 450);  // ~5 sigma
      CHECK(h < n / 5 + 450);
    }
  }
}

TEST_CASE("crossover with identical parents reproduces the parent") {
  for (std::uint64_t seed : {3, 11, 42, 77}) {
    const Instance inst = tiny_instance(seed, 5, 2, 3);
    const Chromosome p = stable_parent(inst, seed);
    std::mt19937_64 rng(seed + 1);
    const Chromosome arcs =
        crossover(inst, p, p, CrossoverMode::common_arcs, rng);
    CHECK(arcs.solution.routes == p.solution.routes);
    CHECK(arcs.fitness == p.fitness);
    const Chromosome nodes =
        crossover(inst, p, p, CrossoverMode::common_nodes, rng);
    CHECK(nodes.solution.routes == p.solution.routes);
    CHECK(nodes.fitness == p.fitness);
  }
}

TEST_CASE("crossover preserves shared structure and stays feasible") {
  int checked_arcs = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = tiny_instance(seed, 5, 2, 3);
    const Chromosome pa = stable_parent(inst, 2 * seed);
    const Chromosome pb = stable_parent(inst, 2 * seed + 1);
    std::mt19937_64 rng(seed);

    const Chromosome child_a =
        crossover(inst, pa, pb, CrossoverMode::common_arcs, rng);
    CHECK(check_solution(inst, child_a.solution).empty());
    std::set<std::pair<int, int>> common;
    const auto arcs_pa = arcs_of(pa.solution);
    const auto arcs_pb = arcs_of(pb.solution);
    const auto arcs_child = arcs_of(child_a.solution);
    std::set_intersection(arcs_pa.begin(), arcs_pa.end(), arcs_pb.begin(),
                          arcs_pb.end(), std::inserter(common, common.begin()));
    for (const auto& arc : common) {
      CHECK(arcs_child.count(arc) == 1);
      ++checked_arcs;
    }

    const Chromosome child_n =
        crossover(inst, pa, pb, CrossoverMode::common_nodes, rng);
    CHECK(check_solution(inst, child_n.solution).empty());
    const auto in_a = customer_route_index(inst, pa.solution);
    const auto in_b = customer_route_index(inst, pb.solution);
    const auto in_c = customer_route_index(inst, child_n.solution);
    for (const Customer& u : inst.customers())
      for (const Customer& v : inst.customers()) {
        if (u.id >= v.id) continue;
        const bool together_a = in_a.at(u.id) == in_a.at(v.id);
        const bool together_b = in_b.at(u.id) == in_b.at(v.id);
        if (together_a && together_b)
          CHECK(in_c.at(u.id) == in_c.at(v.id));
      }

    // Same rng state twice gives the same child.
    std::mt19937_64 r1(seed + 500), r2(seed + 500);
    const Chromosome c1 =
        crossover(inst, pa, pb, CrossoverMode::common_arcs, r1);
    const Chromosome c2 =
        crossover(inst, pa, pb, CrossoverMode::common_arcs, r2);
    CHECK(c1.solution.routes == c2.solution.routes);
  }
  CHECK(checked_arcs > 100);  // the fuzz actually exercised shared arcs
}

TEST_CASE("crossover with disjoint parents rebuilds greedily") {
  const Instance inst = line_instance({10.0, 20.0, 30.0});
  Solution fwd, rev;
  fwd.routes.push_back(make_route({1, 2, 3}));
  rev.routes.push_back(make_route({3, 2, 1}));
  const Chromosome pa = make_chromosome(inst, fwd);
  const Chromosome pb = make_chromosome(inst, rev);
  REQUIRE(std::isfinite(pa.fitness));
  REQUIRE(std::isfinite(pb.fitness));

  std::set<std::pair<int, int>> common;
  const auto arcs_pa = arcs_of(pa.solution);
  const auto arcs_pb = arcs_of(pb.solution);
  std::set_intersection(arcs_pa.begin(), arcs_pa.end(), arcs_pb.begin(),
                        arcs_pb.end(), std::inserter(common, common.begin()));
  REQUIRE(common.empty());

  std::mt19937_64 rng(7);
  const Chromosome child =
      crossover(inst, pa, pb, CrossoverMode::common_arcs, rng);
  CHECK(check_solution(inst, child.solution).empty());
  // Appending to the open route always beats paying another vehicle charge.
  CHECK(child.solution.routes.size() == 1);
}

TEST_CASE("mutation always removes routes without customers") {
  const Instance inst =
      line_instance({10.0}, {Station{0, 15.0, 0.0, 0.0, 180.0}});
  Solution sol;
  sol.routes.push_back(make_route({1}));
  Route station_only;
  station_only.visits.push_back({2, 5.0});
  sol.routes.push_back(station_only);
  sol.routes.push_back(Route{});
  const Chromosome before = make_chromosome(inst, sol);
  REQUIRE(before.solution.metrics.energy_discharged == 5.0);

  GaConfig quiet;
  quiet.mutation_prob = 0.0;
  std::mt19937_64 rng(1);
  const Chromosome after = mutate(inst, before, quiet, rng);
  REQUIRE(after.solution.routes.size() == 1);
  CHECK(after.solution.routes[0] == make_route({1}));
  CHECK(after.solution.metrics.energy_discharged == 0.0);
  CHECK(after.fitness < before.fitness);  // one vehicle charge saved
}

TEST_CASE("zero mutation probability is pure cleanup") {
  GaConfig quiet;
  quiet.mutation_prob = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = tiny_instance(seed);
    const Chromosome ch = stable_parent(inst, seed);
    std::mt19937_64 rng(seed * 31);
    const Chromosome out = mutate(inst, ch, quiet, rng);
    CHECK(out.solution.routes == ch.solution.routes);
    CHECK(out.fitness == ch.fitness);
  }
}

TEST_CASE("mutation keeps solutions feasible and covering") {
  GaConfig loud;
  loud.mutation_prob = 1.0;
  int iterations = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Instance inst = tiny_instance(seed, 5, 2, 3);
    Chromosome ch = stable_parent(inst, seed + 1000);
    std::mt19937_64 rng(seed);
    for (int step = 0; step < 20; ++step) {
      ch = mutate(inst, std::move(ch), loud, rng);
      CHECK(check_solution(inst, ch.solution).empty());
      ++iterations;
    }
  }
  CHECK(iterations == 500);
}

TEST_CASE("initial population construction") {
  SUBCASE("single customer collapses to one identical member") {
    const Instance inst = line_instance({25.0});
    GaConfig cfg;
    cfg.population_size = 6;
    std::mt19937_64 rng(1);
    const auto pop = init_population(inst, cfg, rng);
    REQUIRE(pop.size() == 6);
    for (const Chromosome& ch : pop) {
      CHECK(ch.solution.routes == pop[0].solution.routes);
      CHECK(check_solution(inst, ch.solution).empty());
    }
  }

  SUBCASE("same seed, same population") {
    const Instance inst = tiny_instance(5, 5, 2, 3);
    GaConfig cfg;
    cfg.population_size = 8;
    std::mt19937_64 r1(17), r2(17);
    const auto p1 = init_population(inst, cfg, r1);
    const auto p2 = init_population(inst, cfg, r2);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(p1[i].solution.routes == p2[i].solution.routes);
      CHECK(p1[i].fitness == p2[i].fitness);
    }
  }

  SUBCASE("members are feasible with no customer-free routes") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const Instance inst = tiny_instance(seed, 6, 2, 3);
      GaConfig cfg;
      cfg.population_size = 5;
      std::mt19937_64 rng(seed);
      for (const Chromosome& ch : init_population(inst, cfg, rng)) {
        CHECK(check_solution(inst, ch.solution).empty());
        for (const Route& r : ch.solution.routes) {
          bool customer = false;
          for (const Visit& v : r.visits)
            customer |= inst.kind(v.node) == NodeKind::customer;
          CHECK(customer);
        }
      }
    }
  }

  SUBCASE("a customer no lone vehicle can serve is rejected") {
    // Window closes before any vehicle can arrive.
    const Instance inst = line_instance({30.0}, {}, 10.0, 10.0, 0.0, 10.0);
    GaConfig cfg;
    cfg.population_size = 2;
    std::mt19937_64 rng(3);
    CHECK_THROWS_AS(init_population(inst, cfg, rng), std::runtime_error);
  }
}

TEST_CASE("run_ga rejects bad configurations") {
  const Instance inst = line_instance({25.0});
  GaConfig cfg;
  cfg.population_size = 0;
  CHECK_THROWS_AS(run_ga(inst, cfg), std::invalid_argument);
  cfg = GaConfig{};
  cfg.elite_fraction = 1.0;
  CHECK_THROWS_AS(run_ga(inst, cfg), std::invalid_argument);
  cfg = GaConfig{};
  cfg.mutation_prob = 1.5;
  CHECK_THROWS_AS(run_ga(inst, cfg), std::invalid_argument);
}

TEST_CASE("run_ga solves a single-customer instance at generation zero") {
  const Instance inst = line_instance({25.0});
  const ExactResult exact = solve_exact(inst);
  REQUIRE(exact.proven_optimal);

  GaConfig cfg;
  cfg.population_size = 8;
  cfg.generation_cap = 10;
  cfg.stagnation_limit = 3;
  cfg.seed = 5;
  const GaResult res = run_ga(inst, cfg);
  CHECK(res.best.metrics.cost ==
        doctest::Approx(exact.solution->metrics.cost).epsilon(1e-12));
  REQUIRE(!res.history.empty());
  CHECK(res.history[0].generation == 0);
  CHECK(res.history[0].best_fitness ==
        doctest::Approx(exact.solution->metrics.cost).epsilon(1e-12));
  CHECK(res.generations_run == 3);  // stagnates immediately
  CHECK(res.history.size() == std::size_t(res.generations_run) + 1);
}

TEST_CASE("run_ga best fitness never increases across generations") {
  const Instance inst = tiny_instance(3, 6, 2, 3);
  GaConfig cfg;
  cfg.population_size = 16;
  cfg.generation_cap = 12;
  cfg.stagnation_limit = 12;
  cfg.seed = 9;
  const GaResult res = run_ga(inst, cfg);
  REQUIRE(res.history.size() >= 2);
  for (std::size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].best_fitness <= res.history[i - 1].best_fitness);
  CHECK(check_solution(inst, res.best).empty());
  CHECK(res.best.metrics.vehicles <= inst.fleet_size());
}

TEST_CASE("run_ga is reproducible") {
  const Instance inst = tiny_instance(12, 5, 2, 2);
  GaConfig cfg;
  cfg.population_size = 12;
  cfg.generation_cap = 8;
  cfg.stagnation_limit = 8;
  cfg.seed = 21;
  const GaResult r1 = run_ga(inst, cfg);
  const GaResult r2 = run_ga(inst, cfg);
  CHECK(r1.best.routes == r2.best.routes);
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].best_fitness == r2.history[i].best_fitness);
    CHECK(r1.history[i].mean_fitness == r2.history[i].mean_fitness);
  }
}

TEST_CASE("run_ga matches the exact solver on tiny instances") {
  int matches = 0;
  const int trials = 12;
  for (std::uint64_t seed = 1; seed <= trials; ++seed) {
    const Instance inst = tiny_instance(seed, 4, 2, 2);
    const ExactResult exact = solve_exact(inst);
    REQUIRE(exact.proven_optimal);
    REQUIRE(exact.solution.has_value());

    GaConfig cfg;
    cfg.population_size = 24;
    cfg.elite_fraction = 0.125;
    cfg.mutation_prob = 0.2;
    cfg.stagnation_limit = 10;
    cfg.generation_cap = 40;
    cfg.seed = seed;
    const GaResult res = run_ga(inst, cfg);

    CHECK(check_solution(inst, res.best).empty());
    CHECK(res.best.metrics.vehicles <= inst.fleet_size());
    // A feasible plan can never beat the proven optimum.
    CHECK(res.best.metrics.cost >= exact.solution->metrics.cost - 1e-9);
    if (res.best.metrics.cost <= exact.solution->metrics.cost + 1e-6)
      ++matches;
  }
  CHECK(matches >= 10);
}

TEST_CASE("history_csv emits shortest round-trip decimals") {
  std::vector<GenerationStats> history;
  history.push_back({0, 5.5, 6.25});
  history.push_back({1, 5.0, 6.0});
  CHECK(history_csv(history) ==
        "generation,best_fitness,mean_fitness\n0,5.5,6.25\n1,5,6\n");
}
