#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "evrp/instance.hpp"
#include "evrp/solution.hpp"

namespace evrp {

// A candidate tour set with its score. fitness adds a battery-shortfall
// penalty of 1000 * distance per unit of shortfall on top of the plan cost,
// so feasible members score exactly their objective value and members that
// run the battery below zero are never competitive.
struct Chromosome {
  Solution solution;
  double fitness = 0.0;
  double charge_penalty = 0.0;  // summed battery shortfall over routes
};

struct GaConfig {
  int population_size = 200;
  double elite_fraction = 0.10;
  double mutation_prob = 0.10;
  int stagnation_limit = 50;  // generations without best-fitness improvement
  int generation_cap = 500;
  std::uint64_t seed = 1;
};

enum class CrossoverMode { common_nodes, common_arcs };

struct GenerationStats {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
};

struct GaResult {
  Solution best;
  int generations_run = 0;
  std::vector<GenerationStats> history;
};

// Scores a tour set. Battery shortfall is the only violation absorbed into
// the score; any other violation (timing, capacity, horizon) disqualifies
// the member with an infinite fitness.
double fitness(const Instance& inst, const Solution& solution);

Chromosome make_chromosome(const Instance& inst, Solution solution);

// population_size members built by nearest-neighbor construction from a
// random start customer, then route-reduced and station-enriched. Throws
// std::runtime_error if some customer cannot be served by any lone vehicle.
std::vector<Chromosome> init_population(const Instance& inst,
                                        const GaConfig& config,
                                        std::mt19937_64& rng);

// Binary tournament: two uniform draws (with replacement), lower fitness
// wins, the first draw wins ties.
const Chromosome& select_parent(const std::vector<Chromosome>& population,
                                std::mt19937_64& rng);

// Structure shared by both parents is preserved; the rest is rebuilt.
//   common_arcs:  arcs (including depot anchors) present in both parents
//                 survive as path fragments of the offspring.
//   common_nodes: maximal customer groups co-routed in both parents survive
//                 as routes, ordered as in parent a; a group covering one of
//                 a's routes entirely keeps that route verbatim.
// Freed customers are reinserted cheapest-first in rng order (a fresh route
// is a candidate priced with the vehicle charge); freed stations are dropped
// and profitable stations re-added greedily. Identical parents reproduce
// themselves exactly.
Chromosome crossover(const Instance& inst, const Chromosome& parent_a,
                     const Chromosome& parent_b, CrossoverMode mode,
                     std::mt19937_64& rng);

// Stage 1 always deletes customer-free routes. Stage 2, with probability
// mutation_prob, applies one uniformly chosen operator: random customer
// remove+reinsert, random route dissolve+reinsert, or nearest cross-route
// customer pair remove+reinsert; each ends with discharge re-optimization
// and greedy station insertion.
Chromosome mutate(const Instance& inst, Chromosome chromosome,
                  const GaConfig& config, std::mt19937_64& rng);

// Full lifecycle. Per generation: population_size offspring from tournament
// parents and a uniformly chosen crossover mode, then elitist selection over
// parents plus offspring (top elite_fraction kept, the rest sampled without
// replacement). Stops on stagnation_limit generations without best-fitness
// improvement or at generation_cap. Best fitness never increases between
// generations. The returned solution is the best member seen that fits the
// fleet size (falling back to the overall best if none ever does).
GaResult run_ga(const Instance& inst, const GaConfig& config);

// CSV: generation,best_fitness,mean_fitness
std::string history_csv(const std::vector<GenerationStats>& history);

}  // namespace evrp
