#pragma once

#include <optional>

#include "evrp/instance.hpp"
#include "evrp/simulate.hpp"
#include "evrp/solution.hpp"

namespace evrp {

// Returns a copy of `route` with discharge durations reassigned so that total
// discharge time is maximal for the given visit sequence. Existing durations
// are discarded. Returns nullopt when the sequence is infeasible even with
// all discharging removed.
//
// Maximality holds per station and in total: delaying departure from a
// station can only shrink the windows of later visits, and state of charge
// never increases along a route, so assigning each station its exact cap in
// reverse visit order dominates every other feasible assignment.
std::optional<Route> optimize_discharge(const Instance& inst,
                                        const Route& route);

// Sum of discharge durations over the visits of one route.
double total_discharge(const Route& route);

}  // namespace evrp
