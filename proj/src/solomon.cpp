#include "evrp/solomon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace evrp {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("solomon: line " + std::to_string(line) + ": " +
                           what);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

bool starts_with_digit(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isspace(c)) continue;
    return std::isdigit(c) != 0 || c == '-' || c == '+';
  }
  return false;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace

RawSolomon parse_solomon(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  RawSolomon raw;

  std::size_t i = 0;
  while (i < lines.size() && blank(lines[i])) ++i;
  if (i == lines.size()) fail(int(lines.size()), "empty file");
  {
    std::istringstream in(lines[i]);
    in >> raw.name;
  }
  ++i;

  while (i < lines.size() && lines[i].find("VEHICLE") == std::string::npos) ++i;
  if (i == lines.size()) fail(int(lines.size()), "missing VEHICLE block");
  ++i;  // column header: NUMBER CAPACITY
  while (i < lines.size() && !starts_with_digit(lines[i])) ++i;
  if (i == lines.size()) fail(int(lines.size()), "missing vehicle numbers");
  {
    std::istringstream in(lines[i]);
    if (!(in >> raw.vehicle_count >> raw.vehicle_capacity))
      fail(int(i + 1), "expected vehicle count and capacity");
  }
  ++i;

  while (i < lines.size() && lines[i].find("CUSTOMER") == std::string::npos)
    ++i;
  if (i == lines.size()) fail(int(lines.size()), "missing CUSTOMER table");
  ++i;

  for (; i < lines.size(); ++i) {
    if (blank(lines[i]) || !starts_with_digit(lines[i])) continue;
    SolomonNode n;
    std::istringstream in(lines[i]);
    if (!(in >> n.id >> n.x >> n.y >> n.demand >> n.ready_time >> n.due_date >>
          n.service_time))
      fail(int(i + 1), "expected 7 numeric customer fields");
    double extra;
    if (in >> extra) fail(int(i + 1), "trailing fields after customer row");
    raw.nodes.push_back(n);
  }

  if (raw.nodes.empty() || raw.nodes.front().id != 0)
    fail(int(lines.size()), "missing depot row (customer number 0)");
  return raw;
}

Instance convert_to_evrptwd(const RawSolomon& raw, int n_stations,
                            std::optional<std::pair<double, double>> grid_window,
                            const std::vector<int>& station_ids) {
  if (raw.nodes.empty() || raw.nodes.front().id != 0)
    throw std::invalid_argument("convert: first node must be the depot");
  const int m = int(raw.nodes.size()) - 1;
  if (n_stations < 0 || n_stations >= m)
    throw std::invalid_argument(
        "convert: need 0 <= n_stations < customer count");

  const SolomonNode& d = raw.nodes.front();
  const double horizon = d.due_date;
  double g1 = 0.35 * horizon;
  double g2 = 0.65 * horizon;
  if (grid_window) {
    g1 = grid_window->first;
    g2 = grid_window->second;
  }

  std::unordered_set<int> as_station;
  if (!station_ids.empty()) {
    if (int(station_ids.size()) != n_stations)
      throw std::invalid_argument(
          "convert: station id list size must equal n_stations");
    as_station.insert(station_ids.begin(), station_ids.end());
  } else if (n_stations > 0) {
    const int stride = (m + n_stations - 1) / n_stations;
    for (int k = 0; k < n_stations; ++k) {
      const int idx = k * stride;
      if (idx >= m)
        throw std::invalid_argument(
            "convert: evenly spaced index overflows; pass explicit ids");
      as_station.insert(raw.nodes[std::size_t(idx) + 1].id);
    }
  }

  std::vector<Customer> customers;
  std::vector<Station> stations;
  for (std::size_t i = 1; i < raw.nodes.size(); ++i) {
    const SolomonNode& n = raw.nodes[i];
    if (as_station.count(n.id)) {
      stations.push_back({n.id, n.x, n.y, g1, g2});
    } else {
      customers.push_back({n.id, n.x, n.y, n.demand, n.service_time,
                           n.ready_time, n.due_date});
    }
  }
  if (int(stations.size()) != n_stations)
    throw std::invalid_argument(
        "convert: station ids must name distinct existing customers");

  Fleet fleet;
  fleet.size = raw.vehicle_count;
  fleet.capacity = raw.vehicle_capacity;
  fleet.battery = raw.vehicle_capacity;  // Q tied to C under conversion
  return Instance({d.x, d.y}, std::move(customers), std::move(stations), fleet,
                  CostWeights{}, horizon);
}

}  // namespace evrp
