#include "evrp/discharge.hpp"

#include <algorithm>
#include <vector>

namespace evrp {

double total_discharge(const Route& route) {
  double sum = 0.0;
  for (const Visit& v : route.visits) sum += v.discharge;
  return sum;
}

std::optional<Route> optimize_discharge(const Instance& inst,
                                        const Route& route) {
  Route result = route;
  for (Visit& v : result.visits) v.discharge = 0.0;
  if (!simulate_route(inst, result).ok()) return std::nullopt;

  std::vector<std::size_t> station_idx;
  for (std::size_t i = 0; i < result.visits.size(); ++i)
    if (inst.kind(result.visits[i].node) == NodeKind::station)
      station_idx.push_back(i);

  for (auto it = station_idx.rbegin(); it != station_idx.rend(); ++it) {
    const std::size_t k = *it;
    const Schedule& s = simulate_route(inst, result).schedule;
    const Station& st = inst.station(result.visits[k].node);

    // Binding caps: own grid window, remaining charge, and for every later
    // visit the delay it can absorb (accumulated waiting plus its own slack).
    double cap = st.grid_stop - s.visits[k].service_start;
    cap = std::min(cap, s.return_soc / inst.discharge_rate());

    double absorbed = 0.0;
    for (std::size_t j = k + 1; j < result.visits.size(); ++j) {
      absorbed += s.visits[j].wait;
      const Visit& vj = result.visits[j];
      double slack;
      if (inst.kind(vj.node) == NodeKind::customer)
        slack =
            inst.customer(vj.node).window_close - s.visits[j].service_start;
      else
        slack = inst.station(vj.node).grid_stop - vj.discharge -
                s.visits[j].service_start;
      cap = std::min(cap, absorbed + slack);
    }
    cap = std::min(cap, absorbed + inst.horizon() - s.return_time);

    if (cap > kGammaEps) result.visits[k].discharge = cap;
  }
  return result;
}

}  // namespace evrp
