#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evrp/instance.hpp"

namespace evrp {

struct SolomonNode {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double demand = 0.0;
  double ready_time = 0.0;
  double due_date = 0.0;
  double service_time = 0.0;
};

// A benchmark file as written: title, vehicle block, customer table.
// nodes[0] is the depot (customer number 0).
struct RawSolomon {
  std::string name;
  int vehicle_count = 0;
  double vehicle_capacity = 0.0;
  std::vector<SolomonNode> nodes;
};

// Parses the standard benchmark layout: a title line, a VEHICLE block with
// NUMBER / CAPACITY, and a CUSTOMER table with seven numeric columns.
// Throws std::runtime_error naming the offending line on malformed input.
RawSolomon parse_solomon(const std::string& text);

// Turns a parsed benchmark into a discharge-enabled instance: `n_stations`
// customers become stations (demand and service dropped), battery is set
// equal to cargo capacity, speed and both energy rates default to 1, and the
// depot due date becomes the horizon.
//
// Station selection: customers at evenly spaced list indices k*ceil(m/n),
// unless `station_ids` names explicit customer numbers. The grid peak
// defaults to [0.35, 0.65] of the horizon when `grid_window` is not given.
Instance convert_to_evrptwd(
    const RawSolomon& raw, int n_stations,
    std::optional<std::pair<double, double>> grid_window = std::nullopt,
    const std::vector<int>& station_ids = {});

}  // namespace evrp
