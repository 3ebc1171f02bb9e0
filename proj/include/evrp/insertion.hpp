#pragma once

#include <cstddef>
#include <optional>

#include "evrp/instance.hpp"
#include "evrp/solution.hpp"

namespace evrp {

// A feasible placement of one customer into an existing route, with the
// rebuilt route (discharge re-optimized) and the change in route-level cost.
struct Insertion {
  std::size_t route = 0;
  std::size_t position = 0;
  double cost_delta = 0.0;
  Route updated;
};

// Distance and discharge contribution of one route to the objective; the
// per-vehicle term is accounted at solution level.
double route_cost(const Instance& inst, const Route& route);

// Cheapest feasible insertion of `customer_id` over all non-empty routes
// except `skip`. Every candidate is validated by full simulation with
// discharge durations re-optimized. Returns nullopt when no feasible
// position exists.
std::optional<Insertion> cheapest_insertion(
    const Instance& inst, const Solution& solution, int customer_id,
    std::optional<std::size_t> skip = std::nullopt);

// Inserts unused stations wherever the re-optimized discharge revenue
// outweighs the detour. Applies the single best insertion until none is
// profitable. Returns true if the solution changed.
bool insert_profitable_stations(const Instance& inst, Solution& solution);

// Route-reduction pass: re-optimizes discharge on every route, then
// repeatedly tries to dissolve the route with the fewest customers (ties:
// least total demand, then lowest index) by moving its customers into the
// remaining routes. A dissolution is kept only when total cost strictly
// drops. The result never costs more than the input and never uses more
// vehicles; empty routes are removed.
Solution improve_insertion(const Instance& inst, const Solution& solution);

}  // namespace evrp
