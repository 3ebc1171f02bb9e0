#include "evrp/rl.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "evrp/insertion.hpp"
#include "evrp/text.hpp"

namespace evrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// Drives the env to completion: each decision epoch belongs to the earliest
// free vehicle; when selection cannot serve it, the vehicle retires.
// `sink(env, u, node)` observes every dispatch right before it is applied.
template <typename Sink>
void run_episode(FleetEnv& env, const ValueNetwork& net, double epsilon,
                 std::mt19937_64& rng, Sink&& sink) {
  while (!env.done()) {
    const int trigger = env.next_vehicle();
    const auto pairs = select_assignments(env, net, epsilon, rng);
    bool trigger_assigned = false;
    for (const auto& [u, node] : pairs) {
      sink(env, u, node);
      env.apply(u, node);
      trigger_assigned |= u == trigger;
    }
    if (!trigger_assigned) env.close_vehicle(trigger);
  }
}

}  // namespace

FleetEnv::FleetEnv(const Instance& inst) : inst_(&inst) {
  vehicles_.assign(std::size_t(inst.fleet_size()),
                   VehicleTrip{{}, initial_state(inst), false});
  for (const Customer& c : inst.customers()) open_.push_back(c.id);
  for (const Station& s : inst.stations()) open_.push_back(s.id);
  std::sort(open_.begin(), open_.end());
}

bool FleetEnv::vehicle_closed(int u) const {
  return vehicles_.at(std::size_t(u)).closed;
}

const RouteState& FleetEnv::vehicle(int u) const {
  return vehicles_.at(std::size_t(u)).state;
}

const Route& FleetEnv::route(int u) const {
  return vehicles_.at(std::size_t(u)).route;
}

bool FleetEnv::node_open(int node) const {
  return std::binary_search(open_.begin(), open_.end(), node);
}

bool FleetEnv::done() const {
  for (const VehicleTrip& t : vehicles_)
    if (!t.closed) return false;
  return true;
}

int FleetEnv::next_vehicle() const {
  int best = -1;
  for (int u = 0; u < vehicle_count(); ++u) {
    const VehicleTrip& t = vehicles_[std::size_t(u)];
    if (t.closed) continue;
    if (best < 0 || t.state.ready < vehicles_[std::size_t(best)].state.ready)
      best = u;
  }
  return best;
}

double FleetEnv::clock() const {
  const int u = next_vehicle();
  return u < 0 ? clock_ : vehicles_[std::size_t(u)].state.ready;
}

void FleetEnv::apply(int u, int node) {
  VehicleTrip& t = vehicles_.at(std::size_t(u));
  if (t.closed) throw std::logic_error("rl: dispatching a retired vehicle");
  if (!node_open(node))
    throw std::logic_error("rl: node already served or visited");
  const auto plan = plan_extension(*inst_, t.state, node);
  if (!plan) throw std::logic_error("rl: dispatch fails the masking rules");

  const double gamma =
      inst_->kind(node) == NodeKind::station ? plan->gamma_max : 0.0;
  t.state = apply_extension(*inst_, t.state, node, gamma);
  t.route.visits.push_back({node, gamma});
  open_.erase(std::lower_bound(open_.begin(), open_.end(), node));
  if (inst_->kind(node) == NodeKind::customer) ++served_;
  clock_ = std::max(clock_, t.state.ready);
}

void FleetEnv::close_vehicle(int u) {
  VehicleTrip& t = vehicles_.at(std::size_t(u));
  if (t.closed) throw std::logic_error("rl: vehicle retired twice");
  clock_ = std::max(clock_, t.state.ready);
  t.closed = true;
}

double FleetEnv::fulfilment() const {
  const std::size_t total = inst_->customers().size();
  return total == 0 ? 1.0 : double(served_) / double(total);
}

std::vector<int> FleetEnv::unserved_customers() const {
  std::vector<int> out;
  for (int id : open_)
    if (inst_->kind(id) == NodeKind::customer) out.push_back(id);
  return out;
}

Solution FleetEnv::driven_solution() const {
  Solution sol;
  for (const VehicleTrip& t : vehicles_)
    if (!t.route.empty()) sol.routes.push_back(t.route);
  sol.metrics = compute_metrics(*inst_, sol);
  return sol;
}

RlState build_state(const FleetEnv& env, int vehicle, int node) {
  const Instance& inst = env.instance();
  const RouteState& s = env.vehicle(vehicle);
  const double e_norm = std::max(inst.diagonal_energy(), kFeasEps);
  const double t_norm = std::max(inst.horizon(), kFeasEps);
  const Leg leg = inst.travel(s.position, node);

  RlState st;
  st.b_norm = leg.energy / e_norm;
  st.i_depo = s.position == Instance::kDepotId ? 1.0 : 0.0;
  if (inst.kind(node) == NodeKind::customer) {
    st.i_cust = 1.0;
    st.w_norm =
        std::max(0.0, inst.customer(node).window_open - (s.ready + leg.time)) /
        t_norm;
  } else {
    st.w_norm =
        std::max(0.0, inst.station(node).grid_start - (s.ready + leg.time)) /
        t_norm;
    if (const auto plan = plan_extension(inst, s, node))
      st.z_norm = inst.discharge_rate() * plan->gamma_max / e_norm;
  }
  return st;
}

std::vector<std::pair<int, int>> feasible_pairs(const FleetEnv& env) {
  const Instance& inst = env.instance();
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < env.vehicle_count(); ++u) {
    if (env.vehicle_closed(u)) continue;
    const RouteState& s = env.vehicle(u);
    for (const Customer& c : inst.customers())
      if (env.node_open(c.id) && plan_extension(inst, s, c.id))
        out.push_back({u, c.id});
    for (const Station& st : inst.stations())
      if (env.node_open(st.id) && plan_extension(inst, s, st.id))
        out.push_back({u, st.id});
  }
  return out;
}

double reward(const FleetEnv& env, int vehicle, int node,
              const RewardWeights& w) {
  const RlState s = build_state(env, vehicle, node);
  return -w.a1 * s.b_norm + w.a2 * s.z_norm + w.a3 * s.i_cust -
         w.a4 * s.w_norm - w.a5 * s.i_depo;
}

std::vector<std::pair<int, int>> select_assignments(const FleetEnv& env,
                                                    const ValueNetwork& net,
                                                    double epsilon,
                                                    std::mt19937_64& rng) {
  std::vector<std::pair<int, int>> chosen;
  FleetEnv copy = env;
  const int trigger = copy.next_vehicle();
  if (trigger < 0) return chosen;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const auto pairs = feasible_pairs(copy);
    if (pairs.empty()) break;

    std::pair<int, int> pick = pairs.front();
    if (epsilon > 0.0 && unit(rng) < epsilon) {
      pick = pairs[std::uniform_int_distribution<std::size_t>(
          0, pairs.size() - 1)(rng)];
    } else {
      double best_q = -kInf;
      for (const auto& p : pairs) {
        const double q =
            net.forward(build_state(copy, p.first, p.second).to_input());
        if (q > best_q) {  // first of equals: lowest (vehicle, node)
          best_q = q;
          pick = p;
        }
      }
    }
    chosen.push_back(pick);
    copy.apply(pick.first, pick.second);
    if (pick.first == trigger) break;
  }
  return chosen;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0)
    throw std::invalid_argument("replay buffer: zero capacity");
}

void ReplayBuffer::push(Experience e) {
  entries_.push_back(std::move(e));
  while (entries_.size() > capacity_) entries_.pop_front();
}

const Experience& ReplayBuffer::operator[](std::size_t i) const {
  return entries_.at(i);
}

RlTrainResult train(const RlTrainConfig& config) {
  if (config.episodes < 1 || config.batch_size < 1 ||
      config.buffer_capacity < 1 || config.exploration_episodes < 1)
    throw std::invalid_argument("rl train: bad configuration");

  std::mt19937_64 rng(config.seed);
  ValueNetwork net({5, 12, 6, 3, 1}, rng());
  ReplayBuffer buffer(config.buffer_capacity);
  std::vector<EpisodeStats> curve;
  curve.reserve(std::size_t(config.episodes));

  const double decay_span = std::max(1, config.exploration_episodes - 1);
  for (int ep = 1; ep <= config.episodes; ++ep) {
    const double epsilon =
        std::max(0.0, 1.0 - double(ep - 1) / decay_span);
    const Instance inst = generate_instance(config.gen, rng());

    FleetEnv env(inst);
    run_episode(env, net, epsilon, rng,
                [&](const FleetEnv& at, int u, int node) {
                  const RlState s = build_state(at, u, node);
                  buffer.push(
                      {s, reward(at, u, node), net.forward(s.to_input())});
                });

    double loss = 0.0;
    if (buffer.size() > 0) {
      std::vector<std::size_t> all(buffer.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      std::vector<std::size_t> drawn;
      std::sample(all.begin(), all.end(), std::back_inserter(drawn),
                  std::size_t(config.batch_size), rng);
      std::vector<std::vector<double>> inputs;
      std::vector<double> targets;
      for (std::size_t i : drawn) {
        inputs.push_back(buffer[i].state.to_input());
        targets.push_back(buffer[i].reward);
      }
      loss = net.train_step(inputs, targets);
    }

    const Solution driven = env.driven_solution();
    curve.push_back(
        {ep, env.fulfilment(), driven.metrics.cost, epsilon, loss});
  }
  return RlTrainResult{std::move(net), std::move(curve)};
}

std::string curve_csv(const std::vector<EpisodeStats>& curve) {
  std::ostringstream os;
  os << "episode,fulfilment_ratio,cost,epsilon\n";
  for (const EpisodeStats& e : curve)
    os << e.episode << ',' << format_double(e.fulfilment) << ','
       << format_double(e.cost) << ',' << format_double(e.epsilon) << '\n';
  return os.str();
}

RolloutResult infer(const ValueNetwork& net, const Instance& inst) {
  const auto t0 = std::chrono::steady_clock::now();
  FleetEnv env(inst);
  std::mt19937_64 rng(0);  // untouched at epsilon 0
  run_episode(env, net, 0.0, rng, [](const FleetEnv&, int, int) {});
  const auto t1 = std::chrono::steady_clock::now();

  RolloutResult out;
  out.unserved = env.unserved_customers();
  out.solution = improve_insertion(inst, env.driven_solution());
  out.solution.metrics = compute_metrics(inst, out.solution);
  const auto t2 = std::chrono::steady_clock::now();
  out.rollout_seconds = seconds_between(t0, t1);
  out.refine_seconds = seconds_between(t1, t2);
  return out;
}

}  // namespace evrp
