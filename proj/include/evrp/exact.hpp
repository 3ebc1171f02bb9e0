#pragma once

#include <cstdint>
#include <optional>

#include "evrp/instance.hpp"
#include "evrp/solution.hpp"

namespace evrp {

struct SearchLimits {
  std::uint64_t max_nodes_expanded = 50'000'000;
  double wall_time_budget = 120.0;  // seconds
  // Pitch for grid-based reference evaluations of discharge durations. The
  // solver itself assigns durations continuously per visited sequence (see
  // discharge.hpp), so its result does not depend on this value.
  double gamma_grid_step = 1.0;
  // When false the cost lower bound is skipped and only feasibility pruning
  // remains; results are identical, only nodes_expanded grows.
  bool use_lower_bound = true;

  friend bool operator==(const SearchLimits&, const SearchLimits&) = default;
};

struct ExactResult {
  // Best plan found; empty when the instance is infeasible (proven so when
  // proven_optimal is also set).
  std::optional<Solution> solution;
  bool proven_optimal = false;
  std::uint64_t nodes_expanded = 0;
  // Global lower bound on the optimal cost at exit; equals the returned
  // cost when proven_optimal.
  double bound_at_exit = 0.0;
};

// Depth-first branch-and-bound over route construction: extend the open
// route with a feasible node (ascending id), or close it and start the next
// one. Sequences are explored with zero discharge — removing discharge never
// breaks feasibility — and each closed route gets the continuous-optimal
// durations, so the search is exact over sequences and durations both.
// Symmetry is cut by requiring first-visit ids to increase across routes.
//
// Pruning: cost so far plus, per unvisited customer, the cheapest arc out of
// it, minus the best case of all remaining discharge revenue. Routes serving
// no customer are never built: under the default weights a vehicle fee of
// 101.81 cannot be repaid by y3-priced discharge within any window shorter
// than ~411 time units.
//
// Intended for roughly <= 8 customers and <= 3 stations.
ExactResult solve_exact(const Instance& inst, const SearchLimits& limits = {});

// Independent brute force: every partition of the customers into at most
// fleet_size routes, every order within each route, every station placement.
// Returns the best feasible plan or nullopt when none exists. Guarded to
// <= 6 customers and <= 2 stations (throws std::invalid_argument beyond).
std::optional<Solution> enumerate_all(const Instance& inst);

}  // namespace evrp
