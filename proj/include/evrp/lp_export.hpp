#pragma once
// CPLEX-LP text writer for the routing model, intended for external
// mixed-integer solvers. The encoding has the same feasible set as
// simulate_route plus the fleet-size cap, so an external optimum is directly
// comparable with solve_exact. Variable naming, row families, and the big-M
// constants are documented in the comment header of the emitted text.

#include <string>

#include "evrp/instance.hpp"

namespace evrp {

std::string export_milp(const Instance& inst);

}  // namespace evrp
