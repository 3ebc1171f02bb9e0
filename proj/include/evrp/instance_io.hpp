#pragma once

#include <string>

#include "evrp/instance.hpp"

namespace evrp {

// Plain-text instance format, exact round trip: read_instance(
// write_instance(x)) == x field for field. Layout, '#' starts a comment:
//
//   DEPOT
//   <x> <y>
//   VEHICLE
//   <fleet_size> <capacity> <battery> <consumption_rate> <discharge_rate>
//       <speed> <horizon>                                   (one line)
//   WEIGHTS
//   <per_distance> <per_vehicle> <per_discharge_time>
//   CUSTOMERS
//   <id> <x> <y> <demand> <service_time> <window_open> <window_close>
//   STATIONS
//   <id> <x> <y> <grid_start> <grid_stop>
//
// Sections may appear in any order, each at most once. WEIGHTS and STATIONS
// are optional (defaults / none). Doubles are written with 17 significant
// digits so values survive the trip bit for bit.
std::string write_instance(const Instance& inst);

// Throws std::runtime_error naming the line on syntax errors and
// std::invalid_argument when the parsed data breaks instance invariants.
Instance read_instance(const std::string& text);

// File convenience wrappers; throw std::runtime_error on I/O failure.
Instance read_instance_file(const std::string& path);
void write_instance_file(const std::string& path, const Instance& inst);

}  // namespace evrp
