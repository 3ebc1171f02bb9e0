#include "evrp/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "evrp/discharge.hpp"
#include "evrp/insertion.hpp"
#include "evrp/simulate.hpp"
#include "evrp/text.hpp"

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One offspring route under construction. Visits sharing an atom id came
// from the same inherited fragment and may not be separated; lock_front and
// lock_back pin inherited depot arcs.
struct Frame {
  Route route;
  std::vector<int> atom;
  bool lock_front = false;
  bool lock_back = false;
};

struct Placement {
  double delta = kInf;
  std::size_t frame = 0;  // frames.size() means "open a fresh route"
  std::size_t pos = 0;
  Route updated;
};

// Cheapest admissible placement of `node` across all frames. Admissible
// positions are fragment boundaries only. Candidates are validated by full
// simulation with discharge durations rebuilt from scratch.
std::optional<Placement> best_placement(const Instance& inst,
                                        const std::vector<Frame>& frames,
                                        int node) {
  std::optional<Placement> best;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const Frame& fr = frames[f];
    const double old_cost = fr.route.empty() ? 0.0 : route_cost(inst, fr.route);
    for (std::size_t p = 0; p <= fr.route.visits.size(); ++p) {
      if (p == 0 && fr.lock_front) continue;
      if (p == fr.route.visits.size() && fr.lock_back) continue;
      if (p > 0 && p < fr.route.visits.size() && fr.atom[p - 1] == fr.atom[p])
        continue;
      Route cand = fr.route;
      for (Visit& v : cand.visits) v.discharge = 0.0;
      cand.visits.insert(cand.visits.begin() + long(p), {node, 0.0});
      if (!simulate_route(inst, cand).ok()) continue;
      auto tuned = optimize_discharge(inst, cand);
      if (!tuned) continue;
      const double delta = route_cost(inst, *tuned) - old_cost;
      if (!best || delta < best->delta)
        best = Placement{delta, f, p, std::move(*tuned)};
    }
  }
  return best;
}

// Places one customer at its cheapest admissible spot; opening a fresh
// route is a candidate priced with the vehicle charge. Existing routes win
// delta ties. Throws when the customer fits nowhere.
void place_customer(const Instance& inst, std::vector<Frame>& frames, int id,
                    int& next_atom) {
  std::optional<Placement> best = best_placement(inst, frames, id);
  Route solo;
  solo.visits.push_back({id, 0.0});
  if (simulate_route(inst, solo).ok()) {
    const double delta =
        inst.weights().per_vehicle + route_cost(inst, solo);
    if (!best || delta < best->delta)
      best = Placement{delta, frames.size(), 0, std::move(solo)};
  }
  if (!best)
    throw std::runtime_error("ga: customer " + std::to_string(id) +
                             " cannot be placed on any route");
  if (best->frame == frames.size()) {
    frames.push_back({std::move(best->updated), {next_atom}, false, false});
  } else {
    Frame& fr = frames[best->frame];
    fr.route = std::move(best->updated);
    fr.atom.insert(fr.atom.begin() + long(best->pos), next_atom);
  }
  ++next_atom;
}

// Greedy station enrichment: repeatedly applies the single most profitable
// admissible station placement until none strictly pays for its detour.
void add_profitable_stations(const Instance& inst, std::vector<Frame>& frames,
                             std::set<int>& unused, int& next_atom) {
  for (;;) {
    std::optional<Placement> best;
    int best_station = -1;
    for (int s : unused) {
      std::optional<Placement> cand = best_placement(inst, frames, s);
      if (cand && (!best || cand->delta < best->delta)) {
        best = std::move(cand);
        best_station = s;
      }
    }
    if (!best || best->delta >= -kFeasEps) return;
    Frame& fr = frames[best->frame];
    fr.route = std::move(best->updated);
    fr.atom.insert(fr.atom.begin() + long(best->pos), next_atom);
    ++next_atom;
    unused.erase(best_station);
  }
}

std::set<std::pair<int, int>> solution_arcs(const Solution& s) {
  std::set<std::pair<int, int>> arcs;
  for (const Route& r : s.routes) {
    if (r.empty()) continue;
    int prev = Instance::kDepotId;
    for (const Visit& v : r.visits) {
      arcs.insert({prev, v.node});
      prev = v.node;
    }
    arcs.insert({prev, Instance::kDepotId});
  }
  return arcs;
}

// Splits parent a's routes into maximal chains of arcs present in both
// parents. Chains touching the depot keep that end pinned. Every chain is
// feasible on its own: it serves a subsequence of a feasible route, so all
// arrivals are earlier and all loads lighter.
std::vector<Frame> arc_fragments(const Solution& a,
                                 const std::set<std::pair<int, int>>& common,
                                 std::unordered_set<int>& placed,
                                 int& next_atom) {
  std::vector<Frame> frames;
  Frame cur;
  auto flush = [&] {
    if (!cur.route.visits.empty()) {
      frames.push_back(std::move(cur));
      ++next_atom;
    }
    cur = Frame{};
  };
  for (const Route& r : a.routes) {
    if (r.empty()) continue;
    int prev = Instance::kDepotId;
    for (const Visit& v : r.visits) {
      if (common.count({prev, v.node})) {
        if (cur.route.visits.empty()) {
          if (prev == Instance::kDepotId) {
            cur.lock_front = true;
          } else {
            cur.route.visits.push_back({prev, 0.0});
            cur.atom.push_back(next_atom);
            placed.insert(prev);
          }
        }
        cur.route.visits.push_back({v.node, 0.0});
        cur.atom.push_back(next_atom);
        placed.insert(v.node);
      } else {
        flush();
      }
      prev = v.node;
    }
    if (common.count({prev, Instance::kDepotId})) {
      if (cur.route.visits.empty()) {
        cur.route.visits.push_back({prev, 0.0});
        cur.atom.push_back(next_atom);
        placed.insert(prev);
      }
      cur.lock_back = true;
    }
    flush();
  }
  return frames;
}

// Groups customers by the pair (route in a, route in b); each group is a
// subsequence of one of a's routes and becomes an offspring route in that
// order. A group covering one of a's routes completely keeps the route
// verbatim, stations and discharge included.
std::vector<Frame> node_fragments(const Instance& inst, const Solution& a,
                                  const Solution& b,
                                  std::set<int>& unused_stations,
                                  int& next_atom) {
  std::unordered_map<int, int> route_in_b;
  int rb = 0;
  for (const Route& r : b.routes) {
    if (r.empty()) continue;
    for (const Visit& v : r.visits)
      if (inst.kind(v.node) == NodeKind::customer) route_in_b[v.node] = rb;
    ++rb;
  }

  std::vector<const Route*> routes_a;
  for (const Route& r : a.routes)
    if (!r.empty()) routes_a.push_back(&r);

  std::map<std::pair<int, int>, std::vector<int>> groups;
  std::vector<std::pair<int, int>> order;  // first-appearance order
  for (int ra = 0; ra < int(routes_a.size()); ++ra) {
    for (const Visit& v : routes_a[std::size_t(ra)]->visits) {
      if (inst.kind(v.node) != NodeKind::customer) continue;
      const std::pair<int, int> key{ra, route_in_b.at(v.node)};
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(v.node);
    }
  }

  std::vector<Frame> frames;
  for (const std::pair<int, int>& key : order) {
    const std::vector<int>& members = groups[key];
    const Route& src = *routes_a[std::size_t(key.first)];
    std::size_t src_customers = 0;
    for (const Visit& v : src.visits)
      src_customers += inst.kind(v.node) == NodeKind::customer;

    Frame fr;
    if (members.size() == src_customers) {
      fr.route = src;  // whole route survives, stations included
      for (const Visit& v : fr.route.visits) {
        fr.atom.push_back(next_atom++);
        if (inst.kind(v.node) == NodeKind::station)
          unused_stations.erase(v.node);
      }
    } else {
      for (int id : members) {
        fr.route.visits.push_back({id, 0.0});
        fr.atom.push_back(next_atom++);
      }
    }
    frames.push_back(std::move(fr));
  }
  return frames;
}

Solution frames_to_solution(std::vector<Frame> frames) {
  Solution sol;
  for (Frame& f : frames)
    if (!f.route.empty()) sol.routes.push_back(std::move(f.route));
  return sol;
}

void reoptimize_discharge(const Instance& inst, std::vector<Frame>& frames) {
  for (Frame& f : frames)
    if (auto tuned = optimize_discharge(inst, f.route))
      f.route = std::move(*tuned);
}

// All-singleton atoms: unrestricted insertion positions.
std::vector<Frame> frames_from(const Solution& sol, int& next_atom) {
  std::vector<Frame> frames;
  for (const Route& r : sol.routes) {
    if (r.empty()) continue;
    Frame fr;
    fr.route = r;
    for (std::size_t i = 0; i < r.visits.size(); ++i)
      fr.atom.push_back(next_atom++);
    frames.push_back(std::move(fr));
  }
  return frames;
}

bool has_customer(const Instance& inst, const Route& r) {
  for (const Visit& v : r.visits)
    if (inst.kind(v.node) == NodeKind::customer) return true;
  return false;
}

// Removes the given customers; routes left without customers are dropped,
// releasing their stations.
std::vector<int> extract_customers(const Instance& inst, Solution& sol,
                                   const std::vector<int>& ids) {
  const std::unordered_set<int> gone(ids.begin(), ids.end());
  for (Route& r : sol.routes)
    std::erase_if(r.visits,
                  [&](const Visit& v) { return gone.count(v.node) > 0; });
  std::erase_if(sol.routes,
                [&](const Route& r) { return !has_customer(inst, r); });
  return ids;
}

std::set<int> unused_stations_of(const Instance& inst, const Solution& sol) {
  std::set<int> unused;
  for (const Station& s : inst.stations()) unused.insert(s.id);
  for (const Route& r : sol.routes)
    for (const Visit& v : r.visits) unused.erase(v.node);
  return unused;
}

// Shared tail of the mutation operators: customers in `freed` are placed
// back cheapest-first in rng order, then stations are re-enriched.
Solution rebuild_with(const Instance& inst, Solution sol,
                      std::vector<int> freed, std::mt19937_64& rng) {
  int next_atom = 0;
  std::vector<Frame> frames = frames_from(sol, next_atom);
  reoptimize_discharge(inst, frames);
  std::shuffle(freed.begin(), freed.end(), rng);
  for (int id : freed) place_customer(inst, frames, id, next_atom);
  std::set<int> unused = unused_stations_of(inst, frames_to_solution(frames));
  add_profitable_stations(inst, frames, unused, next_atom);
  return frames_to_solution(std::move(frames));
}

std::vector<int> customers_of(const Instance& inst, const Route& r) {
  std::vector<int> ids;
  for (const Visit& v : r.visits)
    if (inst.kind(v.node) == NodeKind::customer) ids.push_back(v.node);
  return ids;
}

}  // namespace

double fitness(const Instance& inst, const Solution& solution) {
  const CostWeights& w = inst.weights();
  double dist = 0.0;
  double dtime = 0.0;
  double shortfall = 0.0;
  int vehicles = 0;
  for (const Route& r : solution.routes) {
    if (r.empty()) continue;
    ++vehicles;
    SimOutcome out = simulate_route_relaxed(inst, r);
    if (!out.ok()) return kInf;  // only battery shortfall is scoreable
    dist += out.schedule.distance;
    dtime += out.schedule.discharge_time;
    shortfall += std::max(0.0, -out.schedule.min_soc);
  }
  return evaluate_cost(dist, vehicles, dtime, w) + 1000.0 * dist * shortfall;
}

Chromosome make_chromosome(const Instance& inst, Solution solution) {
  Chromosome ch;
  ch.solution = std::move(solution);
  ch.solution.metrics = compute_metrics(inst, ch.solution);
  ch.charge_penalty = 0.0;
  for (const Route& r : ch.solution.routes) {
    if (r.empty()) continue;
    SimOutcome out = simulate_route_relaxed(inst, r);
    if (out.ok()) ch.charge_penalty += std::max(0.0, -out.schedule.min_soc);
  }
  ch.fitness = fitness(inst, ch.solution);
  return ch;
}

std::vector<Chromosome> init_population(const Instance& inst,
                                        const GaConfig& config,
                                        std::mt19937_64& rng) {
  std::vector<Chromosome> population;
  population.reserve(std::size_t(config.population_size));
  for (int m = 0; m < config.population_size; ++m) {
    std::vector<int> unserved;
    for (const Customer& c : inst.customers()) unserved.push_back(c.id);

    auto nearest_feasible = [&](const RouteState& state) {
      int best = -1;
      double best_d = kInf;
      for (int id : unserved) {
        if (!plan_extension(inst, state, id)) continue;
        const double d = inst.travel(state.position, id).distance;
        if (d < best_d || (d == best_d && id < best)) {
          best = id;
          best_d = d;
        }
      }
      return best;
    };

    Solution sol;
    bool first_route = true;
    while (!unserved.empty()) {
      RouteState state = initial_state(inst);
      int next = -1;
      if (first_route) {
        std::vector<int> feasible;
        for (int id : unserved)
          if (plan_extension(inst, state, id)) feasible.push_back(id);
        if (!feasible.empty())
          next = feasible[std::uniform_int_distribution<std::size_t>(
              0, feasible.size() - 1)(rng)];
        first_route = false;
      } else {
        next = nearest_feasible(state);
      }
      if (next < 0)
        throw std::runtime_error(
            "ga: customer " + std::to_string(unserved.front()) +
            " cannot be served by any lone vehicle");
      Route route;
      while (next >= 0) {
        state = apply_extension(inst, state, next, 0.0);
        route.visits.push_back({next, 0.0});
        unserved.erase(std::find(unserved.begin(), unserved.end(), next));
        next = nearest_feasible(state);
      }
      sol.routes.push_back(std::move(route));
    }
    population.push_back(
        make_chromosome(inst, improve_insertion(inst, sol)));
  }
  return population;
}

const Chromosome& select_parent(const std::vector<Chromosome>& population,
                                std::mt19937_64& rng) {
  if (population.empty())
    throw std::invalid_argument("ga: tournament over an empty population");
  std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
  const Chromosome& a = population[pick(rng)];
  const Chromosome& b = population[pick(rng)];
  return b.fitness < a.fitness ? b : a;
}

Chromosome crossover(const Instance& inst, const Chromosome& parent_a,
                     const Chromosome& parent_b, CrossoverMode mode,
                     std::mt19937_64& rng) {
  int next_atom = 0;
  std::vector<Frame> frames;
  std::vector<int> free_customers;
  std::set<int> unused_stations;
  for (const Station& s : inst.stations()) unused_stations.insert(s.id);

  if (mode == CrossoverMode::common_arcs) {
    std::set<std::pair<int, int>> common;
    const auto arcs_a = solution_arcs(parent_a.solution);
    const auto arcs_b = solution_arcs(parent_b.solution);
    std::set_intersection(arcs_a.begin(), arcs_a.end(), arcs_b.begin(),
                          arcs_b.end(),
                          std::inserter(common, common.begin()));
    std::unordered_set<int> placed;
    frames = arc_fragments(parent_a.solution, common, placed, next_atom);
    for (const Customer& c : inst.customers())
      if (!placed.count(c.id)) free_customers.push_back(c.id);
    for (int node : placed) unused_stations.erase(node);
  } else {
    frames = node_fragments(inst, parent_a.solution, parent_b.solution,
                            unused_stations, next_atom);
  }

  reoptimize_discharge(inst, frames);
  std::shuffle(free_customers.begin(), free_customers.end(), rng);
  for (int id : free_customers) place_customer(inst, frames, id, next_atom);
  add_profitable_stations(inst, frames, unused_stations, next_atom);
  return make_chromosome(inst, frames_to_solution(std::move(frames)));
}

Chromosome mutate(const Instance& inst, Chromosome chromosome,
                  const GaConfig& config, std::mt19937_64& rng) {
  Solution sol = std::move(chromosome.solution);
  std::erase_if(sol.routes,
                [&](const Route& r) { return !has_customer(inst, r); });

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < config.mutation_prob) {
    std::vector<int> all;
    for (const Customer& c : inst.customers()) all.push_back(c.id);
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
      case 0: {  // one random customer out and back in
        if (!all.empty()) {
          const int id = all[std::uniform_int_distribution<std::size_t>(
              0, all.size() - 1)(rng)];
          sol = rebuild_with(inst, std::move(sol),
                             extract_customers(inst, sol, {id}), rng);
        }
        break;
      }
      case 1: {  // dissolve one random route
        if (!sol.routes.empty()) {
          const std::size_t idx = std::uniform_int_distribution<std::size_t>(
              0, sol.routes.size() - 1)(rng);
          std::vector<int> freed = customers_of(inst, sol.routes[idx]);
          sol = rebuild_with(inst, std::move(sol),
                             extract_customers(inst, sol, freed), rng);
        }
        break;
      }
      case 2: {  // nearest cross-route pair out and back in
        int u = -1, v = -1;
        double best_d = kInf;
        for (std::size_t i = 0; i < sol.routes.size(); ++i)
          for (std::size_t j = i + 1; j < sol.routes.size(); ++j)
            for (int cu : customers_of(inst, sol.routes[i]))
              for (int cv : customers_of(inst, sol.routes[j])) {
                const double d = inst.travel(cu, cv).distance;
                if (d < best_d) {
                  best_d = d;
                  u = cu;
                  v = cv;
                }
              }
        if (u >= 0)
          sol = rebuild_with(inst, std::move(sol),
                             extract_customers(inst, sol, {u, v}), rng);
        break;
      }
    }
  }
  return make_chromosome(inst, std::move(sol));
}

GaResult run_ga(const Instance& inst, const GaConfig& config) {
  if (config.population_size < 1 || config.elite_fraction <= 0.0 ||
      config.elite_fraction >= 1.0 || config.mutation_prob < 0.0 ||
      config.mutation_prob > 1.0 || config.stagnation_limit < 1 ||
      config.generation_cap < 0)
    throw std::invalid_argument("ga: bad configuration");

  std::mt19937_64 rng(config.seed);
  std::vector<Chromosome> population = init_population(inst, config, rng);

  GaResult res;
  double best_any_fit = kInf;
  double best_fleet_fit = kInf;
  Solution best_any;
  Solution best_fleet;
  bool have_fleet = false;
  auto consider = [&](const Chromosome& ch) {
    if (ch.fitness < best_any_fit) {
      best_any_fit = ch.fitness;
      best_any = ch.solution;
    }
    if (ch.solution.metrics.vehicles <= inst.fleet_size() &&
        ch.fitness < best_fleet_fit) {
      best_fleet_fit = ch.fitness;
      best_fleet = ch.solution;
      have_fleet = true;
    }
  };

  auto record = [&](int gen) {
    double best = kInf;
    double sum = 0.0;
    for (const Chromosome& ch : population) {
      best = std::min(best, ch.fitness);
      sum += ch.fitness;
      consider(ch);
    }
    res.history.push_back({gen, best, sum / double(population.size())});
    return best;
  };

  double last_best = record(0);
  int stall = 0;
  const std::size_t elite = std::min<std::size_t>(
      population.size(),
      std::max<std::size_t>(
          1, std::size_t(config.elite_fraction * config.population_size)));

  for (int gen = 1; gen <= config.generation_cap; ++gen) {
    std::vector<Chromosome> pool = population;
    std::uniform_int_distribution<int> coin(0, 1);
    for (int k = 0; k < config.population_size; ++k) {
      const Chromosome& pa = select_parent(population, rng);
      const Chromosome& pb = select_parent(population, rng);
      const CrossoverMode mode =
          coin(rng) ? CrossoverMode::common_arcs : CrossoverMode::common_nodes;
      Chromosome child = crossover(inst, pa, pb, mode, rng);
      pool.push_back(mutate(inst, std::move(child), config, rng));
    }

    std::stable_sort(pool.begin(), pool.end(),
                     [](const Chromosome& x, const Chromosome& y) {
                       return x.fitness < y.fitness;
                     });
    std::vector<Chromosome> next(pool.begin(),
                                 pool.begin() + long(std::min(elite, pool.size())));
    std::vector<std::size_t> rest(pool.size() - next.size());
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] = next.size() + i;
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t i = 0;
         i < rest.size() && next.size() < std::size_t(config.population_size);
         ++i)
      next.push_back(pool[rest[i]]);
    population = std::move(next);

    res.generations_run = gen;
    const double best = record(gen);
    if (best < last_best - 1e-9) {
      last_best = best;
      stall = 0;
    } else if (++stall >= config.stagnation_limit) {
      break;
    }
  }

  res.best = have_fleet ? std::move(best_fleet) : std::move(best_any);
  res.best.metrics = compute_metrics(inst, res.best);
  return res;
}

std::string history_csv(const std::vector<GenerationStats>& history) {
  std::ostringstream os;
  os << "generation,best_fitness,mean_fitness\n";
  for (const GenerationStats& g : history)
    os << g.generation << ',' << format_double(g.best_fitness) << ','
       << format_double(g.mean_fitness) << '\n';
  return os.str();
}

}  // namespace evrp
