#include "evrp/exact.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "evrp/discharge.hpp"
#include "evrp/simulate.hpp"

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Candidates this close in cost are treated as ties and resolved by the
// canonical key, making the two search strategies agree bit for bit even
// when distinct optima differ only by summation order.
constexpr double kTieEps = 1e-9;
// Lower-bound pruning keeps this much slack so near-ties are never cut.
constexpr double kPruneSlack = 1e-6;

// Re-optimizes discharge and drops stops that cannot discharge; such stops
// only add distance, so no minimal solution contains them. Loops because a
// removal can free room at other stations.
std::optional<Route> tune_route(const Instance& inst, Route route) {
  for (;;) {
    auto tuned = optimize_discharge(inst, route);
    if (!tuned) return std::nullopt;
    Route cleaned;
    for (const Visit& v : tuned->visits)
      if (inst.kind(v.node) == NodeKind::customer || v.discharge > kGammaEps)
        cleaned.visits.push_back(v);
    if (cleaned == *tuned) return cleaned;
    route = std::move(cleaned);
  }
}

std::vector<int> canonical_key(const Solution& sol) {
  std::vector<int> key;
  for (const Route& r : sol.routes) {
    for (const Visit& v : r.visits) key.push_back(v.node);
    key.push_back(-1);  // route separator
  }
  return key;
}

// Tracks the best candidate under (cost, canonical key). Routes are sorted
// by first visit id before scoring so equal plans hash out identically no
// matter which search produced them.
struct BestTracker {
  std::optional<Solution> sol;
  double cost = kInf;
  std::vector<int> key;

  void offer(const Instance& inst, Solution candidate) {
    std::erase_if(candidate.routes, [](const Route& r) { return r.empty(); });
    std::sort(candidate.routes.begin(), candidate.routes.end(),
              [](const Route& a, const Route& b) {
                return a.visits.front().node < b.visits.front().node;
              });
    candidate.metrics = compute_metrics(inst, candidate);
    const double c = candidate.metrics.cost;
    if (c < cost - kTieEps) {
      cost = c;
      key = canonical_key(candidate);
      sol = std::move(candidate);
      return;
    }
    if (c <= cost + kTieEps) {
      std::vector<int> k = canonical_key(candidate);
      if (k < key) {
        cost = c;
        key = std::move(k);
        sol = std::move(candidate);
      }
    }
  }
};

struct Searcher {
  const Instance& inst;
  SearchLimits limits;
  std::chrono::steady_clock::time_point start;
  BestTracker best;
  std::uint64_t nodes = 0;
  bool budget_hit = false;
  double min_cut_bound = kInf;

  std::vector<int> node_order;              // customers + stations, ascending
  std::vector<double> min_out;              // per customer, cheapest arc out
  double total_width = 0.0;                 // sum of station window spans

  std::vector<Route> closed;
  double closed_cost = 0.0;
  double open_legs = 0.0;
  Route open;
  RouteState state;
  std::unordered_set<int> visited;
  double unvisited_min_out = 0.0;
  double width_left = 0.0;  // spans of stations not on closed routes
  int prev_first = -1;

  explicit Searcher(const Instance& i, const SearchLimits& l)
      : inst(i), limits(l), start(std::chrono::steady_clock::now()) {
    for (const Customer& c : inst.customers()) node_order.push_back(c.id);
    for (const Station& s : inst.stations()) {
      node_order.push_back(s.id);
      total_width += s.grid_stop - s.grid_start;
    }
    std::sort(node_order.begin(), node_order.end());
    for (const Customer& c : inst.customers()) {
      double m = inst.travel(c.id, Instance::kDepotId).distance;
      for (int other : node_order)
        if (other != c.id)
          m = std::min(m, inst.travel(c.id, other).distance);
      min_out.push_back(m);
      unvisited_min_out += m;
    }
    width_left = total_width;
    state = initial_state(inst);
  }

  double min_out_of(int customer_id) const {
    // customers() order matches min_out; ids are not assumed contiguous
    const auto& cs = inst.customers();
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (cs[i].id == customer_id) return min_out[i];
    return 0.0;
  }

  bool out_of_budget() {
    if (budget_hit) return true;
    if (nodes >= limits.max_nodes_expanded) budget_hit = true;
    if ((nodes & 1023) == 0) {
      const auto elapsed = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
      if (elapsed > limits.wall_time_budget) budget_hit = true;
    }
    return budget_hit;
  }

  double lower_bound() const {
    const CostWeights& w = inst.weights();
    double lb = closed_cost + w.per_distance * unvisited_min_out -
                w.per_discharge_time * width_left;
    if (!open.empty()) lb += w.per_vehicle + w.per_distance * open_legs;
    return lb;
  }

  void dfs() {
    if (out_of_budget()) {
      min_cut_bound = std::min(min_cut_bound, lower_bound());
      return;
    }
    ++nodes;
    if (limits.use_lower_bound && best.sol &&
        lower_bound() > best.cost + kPruneSlack)
      return;

    const bool all_served = visited.size() == inst.customers().size();

    // Close the open route (it must serve someone; see header).
    bool open_has_customer = false;
    for (const Visit& v : open.visits)
      if (inst.kind(v.node) == NodeKind::customer) open_has_customer = true;
    if (open_has_customer) {
      auto tuned = tune_route(inst, open);
      if (tuned) {  // masking guarantees this, but stay defensive
        const Schedule& s = simulate_route(inst, *tuned).schedule;
        const double add =
            evaluate_cost(s.distance, 1, s.discharge_time, inst.weights());
        double width_used = 0.0;
        for (const Visit& v : tuned->visits)
          if (inst.kind(v.node) == NodeKind::station) {
            const Station& st = inst.station(v.node);
            width_used += st.grid_stop - st.grid_start;
          }

        closed.push_back(*tuned);
        closed_cost += add;
        width_left -= width_used;
        Route saved_open = std::move(open);
        open = Route{};
        const double saved_legs = open_legs;
        open_legs = 0.0;
        RouteState saved_state = state;
        state = initial_state(inst);
        const int saved_prev = prev_first;
        prev_first = saved_open.visits.front().node;

        if (all_served) {
          Solution cand;
          cand.routes = closed;
          best.offer(inst, std::move(cand));
        } else {
          dfs();
        }

        prev_first = saved_prev;
        state = saved_state;
        open_legs = saved_legs;
        open = std::move(saved_open);
        width_left += width_used;
        closed_cost -= add;
        closed.pop_back();
      }
    } else if (all_served && open.empty()) {
      Solution cand;
      cand.routes = closed;
      best.offer(inst, std::move(cand));
      return;
    }

    // Extend with a feasible node, ascending by id. Opening a new route is
    // the same move from an empty open route, capped by the fleet and forced
    // into increasing first-visit order.
    if (open.empty() && int(closed.size()) >= inst.fleet_size()) return;
    for (int id : node_order) {
      if (open.empty() && id <= prev_first) continue;
      const bool is_customer = inst.kind(id) == NodeKind::customer;
      if (is_customer) {
        if (visited.count(id)) continue;
      } else {
        bool used = false;
        for (const Visit& v : open.visits) used = used || v.node == id;
        for (const Route& r : closed)
          for (const Visit& v : r.visits) used = used || v.node == id;
        if (used) continue;
      }
      if (!plan_extension(inst, state, id)) continue;

      const RouteState saved = state;
      open_legs += inst.travel(state.position, id).distance;
      state = apply_extension(inst, state, id, 0.0);
      open.visits.push_back({id, 0.0});
      if (is_customer) {
        visited.insert(id);
        unvisited_min_out -= min_out_of(id);
      }

      dfs();

      if (is_customer) {
        unvisited_min_out += min_out_of(id);
        visited.erase(id);
      }
      open.visits.pop_back();
      state = saved;
      open_legs -= inst.travel(saved.position, id).distance;
    }
  }
};

}  // namespace

ExactResult solve_exact(const Instance& inst, const SearchLimits& limits) {
  Searcher s(inst, limits);
  if (inst.customers().empty()) {
    ExactResult r;
    r.solution = Solution{};
    r.solution->metrics = compute_metrics(inst, *r.solution);
    r.proven_optimal = true;
    r.bound_at_exit = 0.0;
    return r;
  }
  s.dfs();

  ExactResult r;
  r.nodes_expanded = s.nodes;
  r.proven_optimal = !s.budget_hit;
  if (s.best.sol) r.solution = std::move(s.best.sol);
  if (r.proven_optimal) {
    r.bound_at_exit = r.solution ? s.best.cost : kInf;
  } else {
    r.bound_at_exit = std::min(s.min_cut_bound, s.best.cost);
  }
  return r;
}

namespace {

// All permutations of each block, crossed over blocks, stations woven in.
struct Enumerator {
  const Instance& inst;
  BestTracker best;
  std::vector<int> station_ids;

  explicit Enumerator(const Instance& i) : inst(i) {
    for (const Station& s : inst.stations()) station_ids.push_back(s.id);
    std::sort(station_ids.begin(), station_ids.end());
  }

  // Step 3: place each station (in id order) at any position of any route,
  // or leave it out, then score the candidate.
  void place_stations(std::vector<Route>& routes, std::size_t s) {
    if (s == station_ids.size()) {
      Solution cand;
      cand.routes.reserve(routes.size());
      for (const Route& r : routes) {
        auto tuned = tune_route(inst, r);
        if (!tuned) return;
        cand.routes.push_back(std::move(*tuned));
      }
      best.offer(inst, std::move(cand));
      return;
    }
    place_stations(routes, s + 1);  // skip this station
    for (Route& r : routes) {
      for (std::size_t p = 0; p <= r.visits.size(); ++p) {
        r.visits.insert(r.visits.begin() + long(p), {station_ids[s], 0.0});
        if (simulate_route(inst, r).ok()) place_stations(routes, s + 1);
        r.visits.erase(r.visits.begin() + long(p));
      }
    }
  }

  // Step 2: cross product of feasible permutations, one per block.
  void cross_permutations(const std::vector<std::vector<std::vector<int>>>& perms,
                          std::vector<Route>& routes, std::size_t b) {
    if (b == perms.size()) {
      place_stations(routes, 0);
      return;
    }
    for (const std::vector<int>& order : perms[b]) {
      Route r;
      for (int id : order) r.visits.push_back({id, 0.0});
      routes.push_back(std::move(r));
      cross_permutations(perms, routes, b + 1);
      routes.pop_back();
    }
  }

  void try_partition(const std::vector<std::vector<int>>& blocks) {
    std::vector<std::vector<std::vector<int>>> perms(blocks.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      double demand = 0.0;
      for (int id : blocks[b]) demand += inst.customer(id).demand;
      if (demand > inst.capacity() + kFeasEps) return;

      std::vector<int> order = blocks[b];
      std::sort(order.begin(), order.end());
      do {
        Route r;
        for (int id : order) r.visits.push_back({id, 0.0});
        if (simulate_route(inst, r).ok()) perms[b].push_back(order);
      } while (std::next_permutation(order.begin(), order.end()));
      if (perms[b].empty()) return;  // this block cannot be served
    }
    std::vector<Route> routes;
    cross_permutations(perms, routes, 0);
  }

  // Step 1: unordered partitions, blocks created in order of their smallest
  // member so each partition appears exactly once.
  void partitions(const std::vector<int>& ids, std::size_t next,
                  std::vector<std::vector<int>>& blocks) {
    if (next == ids.size()) {
      if (!blocks.empty()) try_partition(blocks);
      return;
    }
    // Index loop: deeper recursion grows `blocks` and may reallocate it.
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(ids[next]);
      partitions(ids, next + 1, blocks);
      blocks[b].pop_back();
    }
    if (int(blocks.size()) < inst.fleet_size()) {
      blocks.push_back({ids[next]});
      partitions(ids, next + 1, blocks);
      blocks.pop_back();
    }
  }
};

}  // namespace

std::optional<Solution> enumerate_all(const Instance& inst) {
  if (inst.customers().size() > 6 || inst.stations().size() > 2)
    throw std::invalid_argument(
        "enumerate_all: guarded to <= 6 customers and <= 2 stations");
  if (inst.customers().empty()) {
    Solution empty;
    empty.metrics = compute_metrics(inst, empty);
    return empty;
  }

  std::vector<int> ids;
  for (const Customer& c : inst.customers()) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());

  Enumerator e(inst);
  std::vector<std::vector<int>> blocks;
  e.partitions(ids, 0, blocks);
  return std::move(e.best.sol);
}

}  // namespace evrp
