#include "evrp/instance_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace evrp {

namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("instance: line " + std::to_string(line) + ": " +
                           what);
}

struct Cursor {
  std::vector<std::string> lines;
  std::size_t next = 0;

  explicit Cursor(const std::string& text) {
    std::istringstream in(text);
    std::string cur;
    while (std::getline(in, cur)) {
      if (auto hash = cur.find('#'); hash != std::string::npos)
        cur.erase(hash);
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
    }
  }

  bool at_end() {
    while (next < lines.size() &&
           lines[next].find_first_not_of(" \t") == std::string::npos)
      ++next;
    return next == lines.size();
  }
  int line_no() const { return int(next) + 1; }
  const std::string& take() { return lines[next++]; }
};

template <typename... Ts>
void parse_fields(const std::string& text, int line, Ts&... fields) {
  std::istringstream in(text);
  if (!((in >> fields) && ...)) fail(line, "expected numeric fields");
  std::string extra;
  if (in >> extra) fail(line, "unexpected trailing field '" + extra + "'");
}

}  // namespace

std::string write_instance(const Instance& inst) {
  std::ostringstream out;
  out << "DEPOT\n" << num(inst.depot().x) << ' ' << num(inst.depot().y) << '\n';
  const Fleet& f = inst.fleet();
  out << "VEHICLE\n"
      << f.size << ' ' << num(f.capacity) << ' ' << num(f.battery) << ' '
      << num(f.consumption_rate) << ' ' << num(f.discharge_rate) << ' '
      << num(f.speed) << ' ' << num(inst.horizon()) << '\n';
  const CostWeights& w = inst.weights();
  out << "WEIGHTS\n"
      << num(w.per_distance) << ' ' << num(w.per_vehicle) << ' '
      << num(w.per_discharge_time) << '\n';
  out << "CUSTOMERS\n";
  for (const Customer& c : inst.customers())
    out << c.id << ' ' << num(c.x) << ' ' << num(c.y) << ' ' << num(c.demand)
        << ' ' << num(c.service_time) << ' ' << num(c.window_open) << ' '
        << num(c.window_close) << '\n';
  out << "STATIONS\n";
  for (const Station& s : inst.stations())
    out << s.id << ' ' << num(s.x) << ' ' << num(s.y) << ' '
        << num(s.grid_start) << ' ' << num(s.grid_stop) << '\n';
  return out.str();
}

Instance read_instance(const std::string& text) {
  Cursor cur(text);
  bool seen_depot = false, seen_vehicle = false, seen_weights = false,
       seen_customers = false, seen_stations = false;
  Depot depot;
  Fleet fleet;
  CostWeights weights;
  double horizon = 0.0;
  std::vector<Customer> customers;
  std::vector<Station> stations;

  while (!cur.at_end()) {
    const int header_line = cur.line_no();
    std::string header;
    {
      std::istringstream in(cur.take());
      in >> header;
    }
    if (header == "DEPOT") {
      if (seen_depot) fail(header_line, "duplicate DEPOT section");
      seen_depot = true;
      if (cur.at_end()) fail(header_line, "DEPOT needs a coordinate line");
      const int line = cur.line_no();
      parse_fields(cur.take(), line, depot.x, depot.y);
    } else if (header == "VEHICLE") {
      if (seen_vehicle) fail(header_line, "duplicate VEHICLE section");
      seen_vehicle = true;
      if (cur.at_end()) fail(header_line, "VEHICLE needs a parameter line");
      const int line = cur.line_no();
      parse_fields(cur.take(), line, fleet.size, fleet.capacity, fleet.battery,
                   fleet.consumption_rate, fleet.discharge_rate, fleet.speed,
                   horizon);
    } else if (header == "WEIGHTS") {
      if (seen_weights) fail(header_line, "duplicate WEIGHTS section");
      seen_weights = true;
      if (cur.at_end()) fail(header_line, "WEIGHTS needs a value line");
      const int line = cur.line_no();
      parse_fields(cur.take(), line, weights.per_distance, weights.per_vehicle,
                   weights.per_discharge_time);
    } else if (header == "CUSTOMERS") {
      if (seen_customers) fail(header_line, "duplicate CUSTOMERS section");
      seen_customers = true;
      while (!cur.at_end()) {
        const std::string& peek = cur.lines[cur.next];
        std::istringstream probe(peek);
        std::string word;
        probe >> word;
        if (word == "DEPOT" || word == "VEHICLE" || word == "WEIGHTS" ||
            word == "STATIONS")
          break;
        const int line = cur.line_no();
        Customer c;
        parse_fields(cur.take(), line, c.id, c.x, c.y, c.demand,
                     c.service_time, c.window_open, c.window_close);
        customers.push_back(c);
      }
    } else if (header == "STATIONS") {
      if (seen_stations) fail(header_line, "duplicate STATIONS section");
      seen_stations = true;
      while (!cur.at_end()) {
        const std::string& peek = cur.lines[cur.next];
        std::istringstream probe(peek);
        std::string word;
        probe >> word;
        if (word == "DEPOT" || word == "VEHICLE" || word == "WEIGHTS" ||
            word == "CUSTOMERS")
          break;
        const int line = cur.line_no();
        Station s;
        parse_fields(cur.take(), line, s.id, s.x, s.y, s.grid_start,
                     s.grid_stop);
        stations.push_back(s);
      }
    } else {
      fail(header_line, "unknown section '" + header + "'");
    }
  }

  if (!seen_depot) fail(cur.line_no(), "missing DEPOT section");
  if (!seen_vehicle) fail(cur.line_no(), "missing VEHICLE section");
  if (!seen_customers) fail(cur.line_no(), "missing CUSTOMERS section");
  return Instance(depot, std::move(customers), std::move(stations), fleet,
                  weights, horizon);
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_instance(buf.str());
}

void write_instance_file(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << write_instance(inst);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace evrp
