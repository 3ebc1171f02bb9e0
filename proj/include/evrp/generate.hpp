#pragma once

#include <array>
#include <cstdint>

#include "evrp/instance.hpp"

namespace evrp {

// Knobs for random training/benchmark instances. Coordinates are uniform in
// the given boxes; demand is exponential with rate `demand_scale` (0.1 means
// a mean of 10 — see the note at generate_instance); window openings are
// uniform and widths are normal, clamped below at `width_min`.
struct GenParams {
  int n_customers = 20;
  int n_stations = 5;
  int n_vehicles = 4;
  std::array<double, 2> coord_range{-100.0, 100.0};
  std::array<double, 2> depot_range{-25.0, 25.0};
  double demand_scale = 0.1;
  double capacity = 200.0;  // C
  double battery = 200.0;   // Q
  double speed = 1.0;
  double consumption_rate = 1.0;  // H
  double discharge_rate = 1.0;    // R
  std::array<double, 2> window_open_range{0.0, 200.0};
  double width_mean = 35.0;
  double width_std = 5.0;
  double width_min = 1.0;
  // Grid peak window as fractions of the derived horizon.
  double grid_start_frac = 0.35;
  double grid_stop_frac = 0.65;
};

// Deterministic for a fixed seed. Customer service times are zero; the
// horizon is the latest possible return time max_i(close_i + s_i + t_i0), so
// no window is cut short; all stations share the fractional grid peak.
//
// Every drawn node admits a lone depot round trip (battery, and for
// customers the time window too); draws violating that are rejected and
// retried, so solvers never see a structurally unservable customer. Throws
// std::invalid_argument when the parameters make such draws hopeless.
//
// `demand_scale` is treated as the *rate* of the exponential distribution
// (0.1 gives mean 10, which fits capacity 200 across ~20 customers). Set the
// field to 1/mean if the other reading is wanted; draws are clamped to
// [0.01, capacity].
Instance generate_instance(const GenParams& params, std::uint64_t seed);

}  // namespace evrp
