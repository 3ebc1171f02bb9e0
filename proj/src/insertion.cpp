#include "evrp/insertion.hpp"

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "evrp/discharge.hpp"
#include "evrp/simulate.hpp"

namespace evrp {

double route_cost(const Instance& inst, const Route& route) {
  if (route.empty()) return 0.0;
  const Schedule& s = simulate_route_relaxed(inst, route).schedule;
  return evaluate_cost(s.distance, 0, s.discharge_time, inst.weights());
}

std::optional<Insertion> cheapest_insertion(const Instance& inst,
                                            const Solution& solution,
                                            int customer_id,
                                            std::optional<std::size_t> skip) {
  std::optional<Insertion> best;
  for (std::size_t r = 0; r < solution.routes.size(); ++r) {
    if (skip && *skip == r) continue;
    const Route& route = solution.routes[r];
    if (route.empty()) continue;
    const double base = route_cost(inst, route);
    for (std::size_t p = 0; p <= route.visits.size(); ++p) {
      Route cand = route;
      for (Visit& v : cand.visits) v.discharge = 0.0;
      cand.visits.insert(cand.visits.begin() + long(p),
                         Visit{customer_id, 0.0});
      if (!simulate_route(inst, cand).ok()) continue;
      auto tuned = optimize_discharge(inst, cand);
      if (!tuned) continue;
      const double delta = route_cost(inst, *tuned) - base;
      if (!best || delta < best->cost_delta)
        best = Insertion{r, p, delta, std::move(*tuned)};
    }
  }
  return best;
}

bool insert_profitable_stations(const Instance& inst, Solution& solution) {
  bool changed = false;
  for (;;) {
    std::unordered_set<int> used;
    for (const Route& route : solution.routes)
      for (const Visit& v : route.visits) used.insert(v.node);

    std::optional<Insertion> best;
    for (const Station& st : inst.stations()) {
      if (used.count(st.id)) continue;
      for (std::size_t r = 0; r < solution.routes.size(); ++r) {
        const Route& route = solution.routes[r];
        if (route.empty()) continue;
        const double base = route_cost(inst, route);
        for (std::size_t p = 0; p <= route.visits.size(); ++p) {
          Route cand = route;
          for (Visit& v : cand.visits) v.discharge = 0.0;
          cand.visits.insert(cand.visits.begin() + long(p), Visit{st.id, 0.0});
          if (!simulate_route(inst, cand).ok()) continue;
          auto tuned = optimize_discharge(inst, cand);
          if (!tuned) continue;
          const double delta = route_cost(inst, *tuned) - base;
          if (delta < -kFeasEps && (!best || delta < best->cost_delta))
            best = Insertion{r, p, delta, std::move(*tuned)};
        }
      }
    }
    if (!best) return changed;
    solution.routes[best->route] = best->updated;
    changed = true;
  }
}

namespace {

double route_demand(const Instance& inst, const Route& route) {
  double sum = 0.0;
  for (const Visit& v : route.visits)
    if (inst.kind(v.node) == NodeKind::customer)
      sum += inst.customer(v.node).demand;
  return sum;
}

int route_customers(const Instance& inst, const Route& route) {
  int n = 0;
  for (const Visit& v : route.visits)
    if (inst.kind(v.node) == NodeKind::customer) ++n;
  return n;
}

}  // namespace

Solution improve_insertion(const Instance& inst, const Solution& solution) {
  Solution best = solution;
  for (Route& route : best.routes) {
    if (route.empty()) continue;
    if (auto tuned = optimize_discharge(inst, route)) route = std::move(*tuned);
  }
  insert_profitable_stations(inst, best);
  double best_cost = compute_metrics(inst, best).cost;

  bool improved = true;
  while (improved) {
    improved = false;

    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < best.routes.size(); ++r)
      if (!best.routes[r].empty()) order.push_back(r);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const int ca = route_customers(inst, best.routes[a]);
      const int cb = route_customers(inst, best.routes[b]);
      if (ca != cb) return ca < cb;
      const double da = route_demand(inst, best.routes[a]);
      const double db = route_demand(inst, best.routes[b]);
      if (da != db) return da < db;
      return a < b;
    });

    for (std::size_t victim : order) {
      Solution trial = best;
      const Route removed = trial.routes[victim];
      trial.routes[victim].visits.clear();

      bool placed_all = true;
      for (const Visit& v : removed.visits) {
        if (inst.kind(v.node) != NodeKind::customer) continue;
        auto ins = cheapest_insertion(inst, trial, v.node, victim);
        if (!ins) {
          placed_all = false;
          break;
        }
        trial.routes[ins->route] = ins->updated;
      }
      if (!placed_all) continue;

      trial.routes.erase(trial.routes.begin() + long(victim));
      insert_profitable_stations(inst, trial);
      const double trial_cost = compute_metrics(inst, trial).cost;
      if (trial_cost < best_cost - kFeasEps) {
        best = std::move(trial);
        best_cost = trial_cost;
        improved = true;
        break;
      }
    }
  }
  return best;
}

}  // namespace evrp
