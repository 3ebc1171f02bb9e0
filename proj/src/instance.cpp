#include "evrp/instance.hpp"

#include <algorithm>
#include <limits>

namespace evrp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("instance: " + what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

Instance::Instance(Depot depot, std::vector<Customer> customers,
                   std::vector<Station> stations, Fleet fleet,
                   CostWeights weights, double horizon)
    : depot_(depot),
      customers_(std::move(customers)),
      stations_(std::move(stations)),
      fleet_(fleet),
      weights_(weights),
      horizon_(horizon) {
  require(finite(depot_.x) && finite(depot_.y), "depot coordinates not finite");
  require(fleet_.size > 0, "fleet size must be positive");
  require(fleet_.capacity > 0.0, "capacity C must be strictly positive");
  require(fleet_.battery > 0.0, "battery Q must be strictly positive");
  require(fleet_.consumption_rate > 0.0, "consumption rate H must be strictly positive");
  require(fleet_.discharge_rate > 0.0, "discharge rate R must be strictly positive");
  require(fleet_.speed > 0.0, "speed must be strictly positive");
  require(weights_.per_distance >= 0.0 && weights_.per_vehicle >= 0.0 &&
              weights_.per_discharge_time >= 0.0,
          "cost weights must be nonnegative");
  require(finite(horizon_) && horizon_ >= 0.0, "horizon must be finite and nonnegative");

  kind_.emplace(kDepotId, NodeKind::depot);
  for (std::size_t i = 0; i < customers_.size(); ++i) {
    const Customer& c = customers_[i];
    require(c.id != kDepotId, "customer id 0 is reserved for the depot");
    require(finite(c.x) && finite(c.y), "customer coordinates not finite");
    require(c.demand > 0.0, "customer demand must be strictly positive (id " +
                                std::to_string(c.id) + ")");
    require(c.service_time >= 0.0, "customer service time must be nonnegative");
    require(0.0 <= c.window_open && c.window_open <= c.window_close &&
                c.window_close <= horizon_ + kFeasEps,
            "customer window must satisfy 0 <= e <= l <= horizon (id " +
                std::to_string(c.id) + ")");
    require(kind_.emplace(c.id, NodeKind::customer).second,
            "duplicate node id " + std::to_string(c.id));
    index_.emplace(c.id, i);
  }
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    const Station& s = stations_[i];
    require(s.id != kDepotId, "station id 0 is reserved for the depot");
    require(finite(s.x) && finite(s.y), "station coordinates not finite");
    require(0.0 <= s.grid_start && s.grid_start <= s.grid_stop &&
                s.grid_stop <= horizon_ + kFeasEps,
            "station grid window must satisfy 0 <= G1 <= G2 <= horizon (id " +
                std::to_string(s.id) + ")");
    require(kind_.emplace(s.id, NodeKind::station).second,
            "duplicate node id " + std::to_string(s.id));
    index_.emplace(s.id, i);
  }

  double lo_x = depot_.x, hi_x = depot_.x, lo_y = depot_.y, hi_y = depot_.y;
  auto stretch = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const Customer& c : customers_) stretch(c.x, c.y);
  for (const Station& s : stations_) stretch(s.x, s.y);
  diagonal_energy_ =
      fleet_.consumption_rate * std::hypot(hi_x - lo_x, hi_y - lo_y);
}

NodeKind Instance::kind(int id) const {
  auto it = kind_.find(id);
  if (it == kind_.end())
    throw std::out_of_range("unknown node id " + std::to_string(id));
  return it->second;
}

double Instance::x_of(int id) const {
  switch (kind(id)) {
    case NodeKind::depot: return depot_.x;
    case NodeKind::customer: return customers_[index_.at(id)].x;
    case NodeKind::station: return stations_[index_.at(id)].x;
  }
  return 0.0;
}

double Instance::y_of(int id) const {
  switch (kind(id)) {
    case NodeKind::depot: return depot_.y;
    case NodeKind::customer: return customers_[index_.at(id)].y;
    case NodeKind::station: return stations_[index_.at(id)].y;
  }
  return 0.0;
}

const Customer& Instance::customer(int id) const {
  if (kind(id) != NodeKind::customer)
    throw std::out_of_range("node " + std::to_string(id) + " is not a customer");
  return customers_[index_.at(id)];
}

const Station& Instance::station(int id) const {
  if (kind(id) != NodeKind::station)
    throw std::out_of_range("node " + std::to_string(id) + " is not a station");
  return stations_[index_.at(id)];
}

Leg Instance::travel(int from, int to) const {
  const double d = std::hypot(x_of(from) - x_of(to), y_of(from) - y_of(to));
  return Leg{d, d / fleet_.speed, fleet_.consumption_rate * d};
}

}  // namespace evrp
