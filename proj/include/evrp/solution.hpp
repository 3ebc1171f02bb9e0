#pragma once

#include <string>
#include <vector>

namespace evrp {

// One stop in a route. `discharge` is the service duration gamma at a
// discharging station; it must be zero at customer nodes.
struct Visit {
  int node = 0;
  double discharge = 0.0;

  friend bool operator==(const Visit& a, const Visit& b) {
    return a.node == b.node && a.discharge == b.discharge;
  }
};

// An ordered visit sequence. The depot start and end are implicit.
struct Route {
  std::vector<Visit> visits;

  bool empty() const { return visits.empty(); }

  friend bool operator==(const Route& a, const Route& b) {
    return a.visits == b.visits;
  }
};

enum class ViolationKind {
  capacity,
  battery,
  customer_window,
  grid_window,
  horizon,
  missing_customer,
  duplicate_visit,
  unknown_node,
  malformed_route,
};

std::string to_string(ViolationKind kind);

// First broken constraint found. `visit_index` equals the route length when
// the depot-return leg is the offender; coverage violations carry only the
// node id.
struct Violation {
  ViolationKind kind = ViolationKind::capacity;
  int route_index = -1;
  int visit_index = -1;
  int node_id = -1;
};

// Derived timeline of one visit.
struct VisitTiming {
  double arrival = 0.0;        // tau
  double wait = 0.0;
  double service_start = 0.0;
  double departure = 0.0;
  double soc_on_arrival = 0.0; // theta
  double load_on_arrival = 0.0; // lambda
};

// Full simulation of one route.
struct Schedule {
  std::vector<VisitTiming> visits;
  double initial_load = 0.0;
  double distance = 0.0;
  double energy_discharged = 0.0;
  double discharge_time = 0.0;
  double return_time = 0.0;
  double return_soc = 0.0;
  double min_soc = 0.0; // minimum over the whole trip, signed in relaxed mode
};

struct Metrics {
  double distance = 0.0;         // d
  int vehicles = 0;              // v, nonempty routes
  double energy_discharged = 0.0; // ed = R * sum(gamma)
  double discharge_time = 0.0;   // sum(gamma)
  double wall_time = 0.0;        // seconds, filled by the bench harness
  double cost = 0.0;

  friend bool operator==(const Metrics& a, const Metrics& b) {
    return a.distance == b.distance && a.vehicles == b.vehicles &&
           a.energy_discharged == b.energy_discharged &&
           a.discharge_time == b.discharge_time && a.cost == b.cost;
  }
};

struct Solution {
  std::vector<Route> routes;
  Metrics metrics;
};

}  // namespace evrp
