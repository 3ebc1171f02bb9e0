#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "evrp/generate.hpp"
#include "evrp/instance.hpp"
#include "evrp/simulate.hpp"
#include "evrp/solution.hpp"
#include "evrp/value_net.hpp"

namespace evrp {

// Features of one (vehicle, node) dispatch option. Energies are normalized
// by the instance's bounding-box diagonal energy, waits by the horizon.
struct RlState {
  double b_norm = 0.0;  // travel energy for the leg
  double z_norm = 0.0;  // planned discharge energy (zero at customers)
  double i_depo = 0.0;  // 1 when the vehicle departs from the depot
  double i_cust = 0.0;  // 1 when the node is a customer
  double w_norm = 0.0;  // forced wait before service starts

  std::vector<double> to_input() const {
    return {b_norm, z_norm, i_depo, i_cust, w_norm};
  }

  friend bool operator==(const RlState&, const RlState&) = default;
};

// Coefficients of the immediate dispatch reward
//   r = -a1*b + a2*z + a3*i_cust - a4*w - a5*i_depo.
struct RewardWeights {
  double a1 = 0.15;   // travel energy penalty
  double a2 = 0.001;  // discharge revenue
  double a3 = 0.15;   // customer service bonus
  double a4 = 0.15;   // wait penalty
  double a5 = 0.55;   // leaving-the-depot penalty
};

// One vehicle pool rolling over one instance. Dispatches are committed one
// node at a time; every committed trip plus its depot return stays feasible
// because candidates are screened by plan_extension. Copyable: assignment
// selection runs lookahead on copies.
class FleetEnv {
 public:
  explicit FleetEnv(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  int vehicle_count() const { return int(vehicles_.size()); }
  bool vehicle_closed(int u) const;
  const RouteState& vehicle(int u) const;  // position, ready, soc, load
  const Route& route(int u) const;
  bool node_open(int node) const;  // still assignable
  bool done() const;               // every vehicle retired
  // Earliest-free open vehicle, lowest id on ties; -1 when done.
  int next_vehicle() const;
  // Decision time: the next free instant, or the latest one seen once done.
  double clock() const;

  // Drives vehicle u to an open node; stations get the maximal feasible
  // discharge. Throws std::logic_error unless the pair is currently listed
  // by feasible_pairs.
  void apply(int u, int node);
  // Sends vehicle u back to the depot and retires it.
  void close_vehicle(int u);

  int customers_served() const { return served_; }
  double fulfilment() const;
  std::vector<int> unserved_customers() const;  // ascending ids
  Solution driven_solution() const;             // non-empty routes, metrics set

 private:
  struct VehicleTrip {
    Route route;
    RouteState state;
    bool closed = false;
  };

  const Instance* inst_;
  std::vector<VehicleTrip> vehicles_;
  std::vector<int> open_;  // assignable node ids, ascending
  int served_ = 0;
  double clock_ = 0.0;
};

// Dispatch features for the pair; well defined even for masked pairs (the
// planned discharge is then zero).
RlState build_state(const FleetEnv& env, int vehicle, int node);

// All dispatches passing the masking rules (capacity, charge with the
// return leg, windows, horizon, and strictly positive discharge room at
// stations), in ascending (vehicle, node) order. Busy vehicles are listed
// too; their legs start when they free up.
std::vector<std::pair<int, int>> feasible_pairs(const FleetEnv& env);

// Immediate reward of dispatching the pair, per RewardWeights.
double reward(const FleetEnv& env, int vehicle, int node,
              const RewardWeights& w = {});

// Chained greedy selection: repeatedly score all feasible pairs, take the
// best (or, with probability epsilon, a uniform feasible pair), apply it to
// a lookahead copy, and stop once the vehicle that triggered the decision
// gets its assignment, nothing is feasible, or no node is left. Equal
// scores fall to the lexicographically smallest pair. Greedy selection
// (epsilon 0) never touches the rng.
std::vector<std::pair<int, int>> select_assignments(const FleetEnv& env,
                                                    const ValueNetwork& net,
                                                    double epsilon,
                                                    std::mt19937_64& rng);

struct Experience {
  RlState state;
  double reward = 0.0;
  double q_estimate = 0.0;
};

// Bounded oldest-first experience store.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Experience e);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& operator[](std::size_t i) const;  // 0 = oldest

 private:
  std::deque<Experience> entries_;
  std::size_t capacity_;
};

struct RlTrainConfig {
  GenParams gen;  // a fresh random instance per episode
  int episodes = 200;
  int batch_size = 16;
  std::size_t buffer_capacity = 5000;
  // Exploration decays linearly from 1 at episode 1 to 0 at this episode.
  int exploration_episodes = 75;
  std::uint64_t seed = 1;
};

struct EpisodeStats {
  int episode = 0;
  double fulfilment = 0.0;  // customers served / customers total
  double cost = 0.0;        // objective of the driven plan
  double epsilon = 0.0;
  double loss = 0.0;        // pre-update batch MSE
};

struct RlTrainResult {
  ValueNetwork network;
  std::vector<EpisodeStats> curve;
};

// Dispatch-policy training: per episode, roll a fresh random instance to
// completion pushing one (state, reward, q) triple per dispatch, then run
// one batch update regressing q toward the immediate reward. Deterministic
// for a fixed config.
RlTrainResult train(const RlTrainConfig& config);

// "episode,fulfilment_ratio,cost,epsilon" rows of the learning curve.
std::string curve_csv(const std::vector<EpisodeStats>& curve);

struct RolloutResult {
  Solution solution;          // refined plan
  std::vector<int> unserved;  // customers the rollout could not reach
  double rollout_seconds = 0.0;
  double refine_seconds = 0.0;
};

// Greedy rollout (epsilon 0) followed by the insertion improvement pass.
// Pure in (network, instance). Unserved customers are reported, never
// silently dropped.
RolloutResult infer(const ValueNetwork& net, const Instance& inst);

}  // namespace evrp
