#include "evrp/simulate.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace evrp {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::capacity: return "capacity";
    case ViolationKind::battery: return "battery";
    case ViolationKind::customer_window: return "customer_window";
    case ViolationKind::grid_window: return "grid_window";
    case ViolationKind::horizon: return "horizon";
    case ViolationKind::missing_customer: return "missing_customer";
    case ViolationKind::duplicate_visit: return "duplicate_visit";
    case ViolationKind::unknown_node: return "unknown_node";
    case ViolationKind::malformed_route: return "malformed_route";
  }
  return "?";
}

namespace {

void validate_route(const Instance& inst, const Route& route) {
  std::unordered_set<int> seen;
  for (const Visit& v : route.visits) {
    if (!inst.has_node(v.node) || v.node == Instance::kDepotId)
      throw std::invalid_argument("route: unknown or depot node id " +
                                  std::to_string(v.node));
    if (!seen.insert(v.node).second)
      throw std::invalid_argument("route: node " + std::to_string(v.node) +
                                  " visited twice");
    if (v.discharge < 0.0)
      throw std::invalid_argument("route: negative discharge duration");
    if (v.discharge > 0.0 && inst.kind(v.node) != NodeKind::station)
      throw std::invalid_argument("route: discharge at non-station node " +
                                  std::to_string(v.node));
  }
}

SimOutcome simulate(const Instance& inst, const Route& route, bool relaxed) {
  validate_route(inst, route);

  SimOutcome out;
  Schedule& sched = out.schedule;
  sched.return_soc = inst.battery();
  sched.min_soc = inst.battery();
  if (route.empty()) return out;

  double load = 0.0;
  for (const Visit& v : route.visits)
    if (inst.kind(v.node) == NodeKind::customer)
      load += inst.customer(v.node).demand;
  sched.initial_load = load;
  if (load > inst.capacity() + kFeasEps) {
    out.violation = Violation{ViolationKind::capacity, -1, 0,
                              route.visits.front().node};
    return out;
  }

  int pos = Instance::kDepotId;
  double time = 0.0;
  double soc = inst.battery();
  const double rate = inst.discharge_rate();

  for (std::size_t i = 0; i < route.visits.size(); ++i) {
    const Visit& v = route.visits[i];
    const Leg leg = inst.travel(pos, v.node);
    VisitTiming t;
    t.arrival = time + leg.time;
    t.soc_on_arrival = soc - leg.energy;
    t.load_on_arrival = load;
    sched.distance += leg.distance;
    soc = t.soc_on_arrival;
    sched.min_soc = std::min(sched.min_soc, soc);
    if (!relaxed && soc < -kFeasEps) {
      out.violation = Violation{ViolationKind::battery, -1, int(i), v.node};
      sched.visits.push_back(t);
      return out;
    }

    if (inst.kind(v.node) == NodeKind::customer) {
      const Customer& c = inst.customer(v.node);
      t.service_start = std::max(t.arrival, c.window_open);
      t.wait = t.service_start - t.arrival;
      if (t.service_start > c.window_close + kFeasEps) {
        out.violation =
            Violation{ViolationKind::customer_window, -1, int(i), v.node};
        sched.visits.push_back(t);
        return out;
      }
      t.departure = t.service_start + c.service_time;
      load -= c.demand;
    } else {
      const Station& s = inst.station(v.node);
      t.service_start = std::max(t.arrival, s.grid_start);
      t.wait = t.service_start - t.arrival;
      if (t.service_start + v.discharge > s.grid_stop + kFeasEps) {
        out.violation =
            Violation{ViolationKind::grid_window, -1, int(i), v.node};
        sched.visits.push_back(t);
        return out;
      }
      t.departure = t.service_start + v.discharge;
      soc -= rate * v.discharge;
      sched.min_soc = std::min(sched.min_soc, soc);
      sched.energy_discharged += rate * v.discharge;
      sched.discharge_time += v.discharge;
      if (!relaxed && soc < -kFeasEps) {
        out.violation = Violation{ViolationKind::battery, -1, int(i), v.node};
        sched.visits.push_back(t);
        return out;
      }
    }
    sched.visits.push_back(t);
    time = t.departure;
    pos = v.node;
  }

  const Leg back = inst.travel(pos, Instance::kDepotId);
  sched.distance += back.distance;
  sched.return_time = time + back.time;
  sched.return_soc = soc - back.energy;
  sched.min_soc = std::min(sched.min_soc, sched.return_soc);
  const int n = int(route.visits.size());
  if (!relaxed && sched.return_soc < -kFeasEps) {
    out.violation = Violation{ViolationKind::battery, -1, n, Instance::kDepotId};
    return out;
  }
  if (sched.return_time > inst.horizon() + kFeasEps) {
    out.violation = Violation{ViolationKind::horizon, -1, n, Instance::kDepotId};
    return out;
  }
  return out;
}

}  // namespace

SimOutcome simulate_route(const Instance& inst, const Route& route) {
  return simulate(inst, route, false);
}

SimOutcome simulate_route_relaxed(const Instance& inst, const Route& route) {
  return simulate(inst, route, true);
}

std::vector<Violation> check_solution(const Instance& inst,
                                      const Solution& solution) {
  std::vector<Violation> out;

  std::unordered_map<int, int> count;
  std::unordered_set<int> bad_routes;
  for (std::size_t r = 0; r < solution.routes.size(); ++r) {
    const Route& route = solution.routes[r];
    for (std::size_t i = 0; i < route.visits.size(); ++i) {
      const Visit& v = route.visits[i];
      if (!inst.has_node(v.node) || v.node == Instance::kDepotId) {
        out.push_back(
            Violation{ViolationKind::unknown_node, int(r), int(i), v.node});
        bad_routes.insert(int(r));
        continue;
      }
      if (v.discharge < 0.0 ||
          (v.discharge > 0.0 && inst.kind(v.node) != NodeKind::station)) {
        out.push_back(
            Violation{ViolationKind::malformed_route, int(r), int(i), v.node});
        bad_routes.insert(int(r));
      }
      if (++count[v.node] == 2) {
        out.push_back(
            Violation{ViolationKind::duplicate_visit, int(r), int(i), v.node});
        bad_routes.insert(int(r));
      }
    }
  }
  for (const Customer& c : inst.customers()) {
    if (count.find(c.id) == count.end())
      out.push_back(Violation{ViolationKind::missing_customer, -1, -1, c.id});
  }

  for (std::size_t r = 0; r < solution.routes.size(); ++r) {
    if (bad_routes.count(int(r))) continue;
    SimOutcome sim = simulate_route(inst, solution.routes[r]);
    if (!sim.ok()) {
      Violation v = *sim.violation;
      v.route_index = int(r);
      out.push_back(v);
    }
  }
  return out;
}

double evaluate_cost(double distance, int vehicles, double discharge_time,
                     const CostWeights& w) {
  return w.per_distance * distance + w.per_vehicle * vehicles -
         w.per_discharge_time * discharge_time;
}

double evaluate_cost(const Metrics& m, const CostWeights& w) {
  return evaluate_cost(m.distance, m.vehicles, m.discharge_time, w);
}

double evaluate_cost_from_energy(double distance, double vehicles,
                                 double energy_discharged,
                                 double discharge_rate, const CostWeights& w) {
  return w.per_distance * distance + w.per_vehicle * vehicles -
         w.per_discharge_time * (energy_discharged / discharge_rate);
}

Metrics compute_metrics(const Instance& inst, const Solution& solution) {
  Metrics m;
  for (const Route& route : solution.routes) {
    if (route.empty()) continue;
    SimOutcome sim = simulate_route_relaxed(inst, route);
    m.distance += sim.schedule.distance;
    m.energy_discharged += sim.schedule.energy_discharged;
    m.discharge_time += sim.schedule.discharge_time;
    m.vehicles += 1;
  }
  m.cost = evaluate_cost(m.distance, m.vehicles, m.discharge_time,
                         inst.weights());
  return m;
}

RouteState initial_state(const Instance& inst) {
  return RouteState{Instance::kDepotId, 0.0, inst.battery(), inst.capacity()};
}

std::optional<ExtendPlan> plan_extension(const Instance& inst,
                                         const RouteState& state, int node) {
  const Leg leg = inst.travel(state.position, node);
  const Leg home = inst.travel(node, Instance::kDepotId);
  ExtendPlan plan;
  plan.arrival = state.ready + leg.time;

  if (inst.kind(node) == NodeKind::customer) {
    const Customer& c = inst.customer(node);
    if (c.demand > state.load + kFeasEps) return std::nullopt;
    if (state.soc < leg.energy + home.energy - kFeasEps) return std::nullopt;
    plan.service_start = std::max(plan.arrival, c.window_open);
    plan.wait = plan.service_start - plan.arrival;
    if (plan.service_start > c.window_close + kFeasEps) return std::nullopt;
    if (plan.service_start + c.service_time + home.time >
        inst.horizon() + kFeasEps)
      return std::nullopt;
    return plan;
  }

  const Station& s = inst.station(node);
  plan.service_start = std::max(plan.arrival, s.grid_start);
  plan.wait = plan.service_start - plan.arrival;
  const double by_window = s.grid_stop - plan.service_start;
  const double by_charge =
      (state.soc - leg.energy - home.energy) / inst.discharge_rate();
  const double by_horizon = inst.horizon() - home.time - plan.service_start;
  plan.gamma_max = std::min({by_window, by_charge, by_horizon});
  if (plan.gamma_max <= 0.0) return std::nullopt;
  return plan;
}

RouteState apply_extension(const Instance& inst, const RouteState& state,
                           int node, double gamma) {
  const Leg leg = inst.travel(state.position, node);
  RouteState next = state;
  next.position = node;
  next.soc = state.soc - leg.energy;
  const double arrival = state.ready + leg.time;
  if (inst.kind(node) == NodeKind::customer) {
    const Customer& c = inst.customer(node);
    next.ready = std::max(arrival, c.window_open) + c.service_time;
    next.load = state.load - c.demand;
  } else {
    const Station& s = inst.station(node);
    next.ready = std::max(arrival, s.grid_start) + gamma;
    next.soc -= inst.discharge_rate() * gamma;
  }
  return next;
}

RouteState state_after_prefix(const Instance& inst, const Route& route,
                              std::size_t n_visits) {
  RouteState state = initial_state(inst);
  for (std::size_t i = 0; i < n_visits && i < route.visits.size(); ++i)
    state = apply_extension(inst, state, route.visits[i].node,
                            route.visits[i].discharge);
  return state;
}

}  // namespace evrp
