#pragma once

#include <optional>

#include "evrp/instance.hpp"
#include "evrp/solution.hpp"

namespace evrp {

// Result of propagating one route. On failure `violation` names the first
// broken constraint and `schedule` holds the timeline up to that visit.
struct SimOutcome {
  Schedule schedule;
  std::optional<Violation> violation;

  bool ok() const { return !violation.has_value(); }
};

// Propagates arrival time, wait, state of charge and cargo along a route.
// The vehicle leaves the depot at time 0 carrying the route's total demand
// and must return with nonnegative charge before the horizon.
// Throws std::invalid_argument on malformed routes (duplicate nodes, unknown
// ids, discharge at a customer).
SimOutcome simulate_route(const Instance& inst, const Route& route);

// Same propagation but battery shortfalls do not abort: `min_soc` may end up
// negative. Time-window, grid-window, capacity and horizon constraints are
// still enforced. Used for charge-penalty scoring.
SimOutcome simulate_route_relaxed(const Instance& inst, const Route& route);

// Checks customer coverage plus every per-route constraint. Empty result iff
// the solution is feasible. Flow conservation holds by construction of Route
// and is not re-checked.
std::vector<Violation> check_solution(const Instance& inst,
                                      const Solution& solution);

// Trip cost per the weighted objective: distance and vehicle terms minus the
// discharge-time reward.
double evaluate_cost(double distance, int vehicles, double discharge_time,
                     const CostWeights& w);
double evaluate_cost(const Metrics& m, const CostWeights& w);

// Cost from an energy-discharged column: discharge time is ed / R.
double evaluate_cost_from_energy(double distance, double vehicles,
                                 double energy_discharged,
                                 double discharge_rate, const CostWeights& w);

// Aggregates route schedules into solution metrics (relaxed propagation, so
// it is total even on battery-infeasible inputs) and fills `cost`.
Metrics compute_metrics(const Instance& inst, const Solution& solution);

// State of a vehicle resuming from `position`, ready to depart at `ready`.
struct RouteState {
  int position = Instance::kDepotId;
  double ready = 0.0;
  double soc = 0.0;
  double load = 0.0;
};

RouteState initial_state(const Instance& inst);

// Feasibility screen for extending a trip from `state` to `node`:
//   - customers: demand within remaining load, service starts within the
//     window, charge covers the leg plus the return to the depot, and the
//     return lands before the horizon;
//   - stations: same screens plus room for a strictly positive discharge
//     (`gamma_max` bounds it by grid window, charge and horizon).
// Returns nothing when any screen fails.
struct ExtendPlan {
  double arrival = 0.0;
  double wait = 0.0;
  double service_start = 0.0;
  double gamma_max = 0.0; // zero at customers
};

std::optional<ExtendPlan> plan_extension(const Instance& inst,
                                         const RouteState& state, int node);

// Advances the state over `node` with discharge duration `gamma` (must be
// feasible per plan_extension).
RouteState apply_extension(const Instance& inst, const RouteState& state,
                           int node, double gamma);

// State after driving a full route prefix, starting from the depot.
RouteState state_after_prefix(const Instance& inst, const Route& route,
                              std::size_t n_visits);

}  // namespace evrp
