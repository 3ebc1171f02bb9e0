#include "evrp/generate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace evrp {

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("generate: ") + what);
}

}  // namespace

Instance generate_instance(const GenParams& p, std::uint64_t seed) {
  check(p.n_customers > 0, "n_customers must be positive");
  check(p.n_stations >= 0, "n_stations must be nonnegative");
  check(p.n_vehicles > 0, "n_vehicles must be positive");
  check(p.coord_range[0] < p.coord_range[1], "coord_range ill-ordered");
  check(p.depot_range[0] < p.depot_range[1], "depot_range ill-ordered");
  check(p.window_open_range[0] <= p.window_open_range[1],
        "window_open_range ill-ordered");
  check(p.demand_scale > 0.0, "demand_scale must be positive");
  check(p.width_std >= 0.0 && p.width_min > 0.0, "width parameters invalid");
  check(0.0 <= p.grid_start_frac && p.grid_start_frac <= p.grid_stop_frac &&
            p.grid_stop_frac <= 1.0,
        "grid fractions must satisfy 0 <= start <= stop <= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(p.coord_range[0],
                                               p.coord_range[1]);
  std::uniform_real_distribution<double> depot_coord(p.depot_range[0],
                                                     p.depot_range[1]);
  std::exponential_distribution<double> demand(p.demand_scale);
  std::uniform_real_distribution<double> open(p.window_open_range[0],
                                              p.window_open_range[1]);
  std::normal_distribution<double> width(p.width_mean, p.width_std);

  const Depot depot{depot_coord(rng), depot_coord(rng)};

  // A node no lone trip can visit (battery round trip, or a window closing
  // before the earliest possible arrival) makes the instance unsolvable for
  // every solver in the suite; such draws are rejected and retried.
  auto round_trip_fits = [&](double x, double y) {
    return 2.0 * std::hypot(x - depot.x, y - depot.y) * p.consumption_rate <=
           p.battery;
  };

  std::vector<Customer> customers;
  customers.reserve(std::size_t(p.n_customers));
  for (int i = 1; i <= p.n_customers; ++i) {
    Customer c;
    c.id = i;
    c.service_time = 0.0;
    for (int attempt = 0;; ++attempt) {
      check(attempt < 100000, "parameters leave customers unservable");
      c.x = coord(rng);
      c.y = coord(rng);
      c.demand = std::clamp(demand(rng), 0.01, p.capacity);
      c.window_open = open(rng);
      c.window_close = c.window_open + std::max(width(rng), p.width_min);
      if (round_trip_fits(c.x, c.y) &&
          std::hypot(c.x - depot.x, c.y - depot.y) / p.speed <= c.window_close)
        break;
    }
    customers.push_back(c);
  }

  std::vector<Station> stations;
  stations.reserve(std::size_t(p.n_stations));
  for (int i = 0; i < p.n_stations; ++i) {
    Station s;
    s.id = p.n_customers + 1 + i;
    for (int attempt = 0;; ++attempt) {
      check(attempt < 100000, "parameters leave stations unreachable");
      s.x = coord(rng);
      s.y = coord(rng);
      if (round_trip_fits(s.x, s.y)) break;
    }
    stations.push_back(s);
  }

  // Horizon: every customer can be served at the end of its window and the
  // vehicle still gets home.
  double horizon = 0.0;
  for (const Customer& c : customers) {
    const double back =
        std::hypot(c.x - depot.x, c.y - depot.y) / p.speed;
    horizon = std::max(horizon, c.window_close + c.service_time + back);
  }
  for (Station& s : stations) {
    s.grid_start = p.grid_start_frac * horizon;
    s.grid_stop = p.grid_stop_frac * horizon;
  }

  Fleet fleet;
  fleet.size = p.n_vehicles;
  fleet.capacity = p.capacity;
  fleet.battery = p.battery;
  fleet.consumption_rate = p.consumption_rate;
  fleet.discharge_rate = p.discharge_rate;
  fleet.speed = p.speed;

  return Instance(depot, std::move(customers), std::move(stations), fleet,
                  CostWeights{}, horizon);
}

}  // namespace evrp
