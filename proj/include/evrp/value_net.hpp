#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace evrp {

// Small dense regressor scoring dispatch options: rectified-linear hidden
// layers, one linear output unit, adaptive-moment updates. Deliberately
// minimal; sized for a handful of inputs, not general model work.
class ValueNetwork {
 public:
  // `layer_sizes` runs input to output and must end in 1. Weights and
  // biases start uniform in +-1/sqrt(fan_in), drawn deterministically
  // from `init_seed`.
  ValueNetwork(std::vector<int> layer_sizes, std::uint64_t init_seed);

  double forward(const std::vector<double>& input) const;

  // One optimizer update toward the targets; returns the pre-update mean
  // squared error. `inputs` and `targets` must be equal-length and nonempty.
  double train_step(const std::vector<std::vector<double>>& inputs,
                    const std::vector<double>& targets);

  // Gradient of the batch mean squared error, aligned with parameters().
  std::vector<double> gradient(const std::vector<std::vector<double>>& inputs,
                               const std::vector<double>& targets) const;

  // Flat parameter vector: per layer, weights row-major then biases.
  std::vector<double> parameters() const;
  // Replaces all parameters; optimizer state is left untouched.
  void set_parameters(const std::vector<double>& flat);
  std::size_t parameter_count() const;

  const std::vector<int>& layer_sizes() const { return sizes_; }
  double learning_rate() const { return learning_rate_; }
  std::int64_t steps_taken() const { return step_; }

  // Optimizer accumulators, aligned with parameters(). For checkpoints.
  const std::vector<double>& moment1() const { return m_; }
  const std::vector<double>& moment2() const { return v_; }
  void restore_optimizer(std::vector<double> m, std::vector<double> v,
                         std::int64_t step);

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
  };

  // Accumulates the batch-MSE gradient into `grad` (sized parameter_count)
  // and returns the MSE itself.
  double backprop(const std::vector<std::vector<double>>& inputs,
                  const std::vector<double>& targets,
                  std::vector<double>& grad) const;

  std::vector<int> sizes_;
  std::vector<Layer> layers_;
  double learning_rate_ = 0.001;
  std::vector<double> m_;  // first moments
  std::vector<double> v_;  // second moments
  std::int64_t step_ = 0;
};

// Versioned text checkpoint: layer sizes, parameters, optimizer state and
// the seed the owning training run used. Doubles are written as shortest
// round-trip decimals, so a load restores the network bit for bit.
void save_checkpoint(std::ostream& os, const ValueNetwork& network,
                     std::uint64_t train_seed);

struct Checkpoint {
  ValueNetwork network;
  std::uint64_t train_seed = 0;
};

// Throws std::runtime_error on unknown versions, malformed fields, or
// parameter blocks that do not match the declared layer sizes.
Checkpoint load_checkpoint(std::istream& is);

}  // namespace evrp
