#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace evrp {

// Absolute slack used in all time/energy/cargo feasibility comparisons.
inline constexpr double kFeasEps = 1e-6;
// Tolerance for discharge-duration maximality.
inline constexpr double kGammaEps = 1e-6;

struct CostWeights {
  double per_distance = 0.0354;       // Y1
  double per_vehicle = 101.81;        // Y2
  double per_discharge_time = 0.2478; // Y3

  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

struct Depot {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Depot&, const Depot&) = default;
};

struct Customer {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double demand = 0.0;       // c_i, cargo units
  double service_time = 0.0; // s_i
  double window_open = 0.0;  // e_i
  double window_close = 0.0; // l_i

  friend bool operator==(const Customer&, const Customer&) = default;
};

struct Station {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double grid_start = 0.0; // G1_i, grid peak begins
  double grid_stop = 0.0;  // G2_i, grid peak ends

  friend bool operator==(const Station&, const Station&) = default;
};

struct Fleet {
  int size = 1;                   // u
  double capacity = 200.0;        // C
  double battery = 200.0;         // Q
  double consumption_rate = 1.0;  // H, energy per distance
  double discharge_rate = 1.0;    // R, energy per time
  double speed = 1.0;             // distance per time

  friend bool operator==(const Fleet&, const Fleet&) = default;
};

enum class NodeKind { depot, customer, station };

struct Leg {
  double distance = 0.0;
  double time = 0.0;
  double energy = 0.0;
};

// Immutable problem description. The depot always has node id 0; customer and
// station ids are positive and unique. Construction validates all invariants
// and throws std::invalid_argument naming the first breach.
class Instance {
 public:
  Instance(Depot depot, std::vector<Customer> customers,
           std::vector<Station> stations, Fleet fleet, CostWeights weights,
           double horizon);

  const Depot& depot() const { return depot_; }
  const std::vector<Customer>& customers() const { return customers_; }
  const std::vector<Station>& stations() const { return stations_; }
  const Fleet& fleet() const { return fleet_; }
  const CostWeights& weights() const { return weights_; }
  double horizon() const { return horizon_; }

  int fleet_size() const { return fleet_.size; }
  double capacity() const { return fleet_.capacity; }
  double battery() const { return fleet_.battery; }
  double consumption_rate() const { return fleet_.consumption_rate; }
  double discharge_rate() const { return fleet_.discharge_rate; }
  double speed() const { return fleet_.speed; }

  static constexpr int kDepotId = 0;

  bool has_node(int id) const { return kind_.count(id) != 0; }
  NodeKind kind(int id) const;
  double x_of(int id) const;
  double y_of(int id) const;
  const Customer& customer(int id) const;
  const Station& station(int id) const;

  // Euclidean travel metrics between two nodes: distance, time, energy.
  Leg travel(int from, int to) const;

  // Energy to traverse the diagonal of the bounding box of all nodes.
  double diagonal_energy() const { return diagonal_energy_; }

 private:
  Depot depot_;
  std::vector<Customer> customers_;
  std::vector<Station> stations_;
  Fleet fleet_;
  CostWeights weights_;
  double horizon_ = 0.0;
  double diagonal_energy_ = 0.0;
  std::unordered_map<int, NodeKind> kind_;
  std::unordered_map<int, std::size_t> index_;
};

// travel() as a free function, symmetric in its node arguments.
inline Leg travel(const Instance& inst, int from, int to) {
  return inst.travel(from, to);
}

// Exact field-wise equality, used by the text-format round-trip contract.
inline bool operator==(const Instance& a, const Instance& b) {
  return a.depot() == b.depot() && a.customers() == b.customers() &&
         a.stations() == b.stations() && a.fleet() == b.fleet() &&
         a.weights() == b.weights() && a.horizon() == b.horizon();
}

}  // namespace evrp
