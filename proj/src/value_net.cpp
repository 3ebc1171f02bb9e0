#include "evrp/value_net.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "evrp/text.hpp"

namespace evrp {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

ValueNetwork::ValueNetwork(std::vector<int> layer_sizes,
                           std::uint64_t init_seed)
    : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("value net: need input and output layers");
  for (int n : sizes_)
    if (n < 1) throw std::invalid_argument("value net: empty layer");
  if (sizes_.back() != 1)
    throw std::invalid_argument("value net: output must be a single unit");

  std::mt19937_64 rng(init_seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    Layer layer;
    layer.in = sizes_[l];
    layer.out = sizes_[l + 1];
    const double scale = 1.0 / std::sqrt(double(layer.in));
    std::uniform_real_distribution<double> unit(-scale, scale);
    layer.w.resize(std::size_t(layer.out) * std::size_t(layer.in));
    for (double& w : layer.w) w = unit(rng);
    // Random biases too: an all-zero bias vector lets a dead input cascade
    // park preactivations exactly on the rectifier kink, which is both bad
    // for training and nondifferentiable.
    layer.b.resize(std::size_t(layer.out));
    for (double& b : layer.b) b = unit(rng);
    layers_.push_back(std::move(layer));
  }
  m_.assign(parameter_count(), 0.0);
  v_.assign(parameter_count(), 0.0);
}

double ValueNetwork::forward(const std::vector<double>& input) const {
  if (int(input.size()) != sizes_.front())
    throw std::invalid_argument("value net: input width mismatch");
  std::vector<double> a = input;
  std::vector<double> z;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    z.assign(std::size_t(layer.out), 0.0);
    for (int r = 0; r < layer.out; ++r) {
      double s = layer.b[std::size_t(r)];
      const double* row = layer.w.data() + std::size_t(r) * std::size_t(layer.in);
      for (int c = 0; c < layer.in; ++c) s += row[c] * a[std::size_t(c)];
      z[std::size_t(r)] = s;
    }
    const bool hidden = l + 1 < layers_.size();
    if (hidden)
      for (double& x : z) x = x > 0.0 ? x : 0.0;
    a = z;
  }
  return a[0];
}

double ValueNetwork::backprop(const std::vector<std::vector<double>>& inputs,
                              const std::vector<double>& targets,
                              std::vector<double>& grad) const {
  if (inputs.empty() || inputs.size() != targets.size())
    throw std::invalid_argument("value net: bad batch");

  double mse = 0.0;
  const double inv_n = 1.0 / double(inputs.size());
  std::vector<std::vector<double>> act(layers_.size() + 1);
  std::vector<std::vector<double>> pre(layers_.size());

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (int(inputs[k].size()) != sizes_.front())
      throw std::invalid_argument("value net: input width mismatch");
    act[0] = inputs[k];
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Layer& layer = layers_[l];
      pre[l].assign(std::size_t(layer.out), 0.0);
      for (int r = 0; r < layer.out; ++r) {
        double s = layer.b[std::size_t(r)];
        const double* row =
            layer.w.data() + std::size_t(r) * std::size_t(layer.in);
        for (int c = 0; c < layer.in; ++c)
          s += row[c] * act[l][std::size_t(c)];
        pre[l][std::size_t(r)] = s;
      }
      act[l + 1] = pre[l];
      if (l + 1 < layers_.size())
        for (double& x : act[l + 1]) x = x > 0.0 ? x : 0.0;
    }

    const double err = act.back()[0] - targets[k];
    mse += err * err * inv_n;

    // d(MSE)/d(output) for this sample.
    std::vector<double> delta{2.0 * err * inv_n};
    std::size_t offset = parameter_count();
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Layer& layer = layers_[l];
      const std::size_t nw = layer.w.size();
      const std::size_t nb = layer.b.size();
      offset -= nw + nb;
      double* gw = grad.data() + offset;
      double* gb = grad.data() + offset + nw;
      for (int r = 0; r < layer.out; ++r) {
        const double d = delta[std::size_t(r)];
        gb[r] += d;
        double* row = gw + std::size_t(r) * std::size_t(layer.in);
        for (int c = 0; c < layer.in; ++c)
          row[c] += d * act[l][std::size_t(c)];
      }
      if (l == 0) break;
      std::vector<double> prev(std::size_t(layer.in), 0.0);
      for (int c = 0; c < layer.in; ++c) {
        double s = 0.0;
        for (int r = 0; r < layer.out; ++r)
          s += layer.w[std::size_t(r) * std::size_t(layer.in) +
                       std::size_t(c)] *
               delta[std::size_t(r)];
        // Rectifier gate of the layer below.
        prev[std::size_t(c)] = pre[l - 1][std::size_t(c)] > 0.0 ? s : 0.0;
      }
      delta = std::move(prev);
    }
  }
  return mse;
}

std::vector<double> ValueNetwork::gradient(
    const std::vector<std::vector<double>>& inputs,
    const std::vector<double>& targets) const {
  std::vector<double> grad(parameter_count(), 0.0);
  backprop(inputs, targets, grad);
  return grad;
}

double ValueNetwork::train_step(const std::vector<std::vector<double>>& inputs,
                                const std::vector<double>& targets) {
  std::vector<double> grad(parameter_count(), 0.0);
  const double mse = backprop(inputs, targets, grad);

  ++step_;
  const double c1 = 1.0 - std::pow(kBeta1, double(step_));
  const double c2 = 1.0 - std::pow(kBeta2, double(step_));
  std::vector<double> flat = parameters();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
    v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
    flat[i] -= learning_rate_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kAdamEps);
  }
  set_parameters(flat);
  return mse;
}

std::vector<double> ValueNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& layer : layers_) {
    flat.insert(flat.end(), layer.w.begin(), layer.w.end());
    flat.insert(flat.end(), layer.b.begin(), layer.b.end());
  }
  return flat;
}

void ValueNetwork::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("value net: parameter count mismatch");
  std::size_t i = 0;
  for (Layer& layer : layers_) {
    for (double& w : layer.w) w = flat[i++];
    for (double& b : layer.b) b = flat[i++];
  }
}

std::size_t ValueNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.w.size() + layer.b.size();
  return n;
}

void ValueNetwork::restore_optimizer(std::vector<double> m,
                                     std::vector<double> v,
                                     std::int64_t step) {
  if (m.size() != parameter_count() || v.size() != parameter_count() ||
      step < 0)
    throw std::invalid_argument("value net: optimizer state mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  step_ = step;
}

namespace {

void write_block(std::ostream& os, const char* tag,
                 const std::vector<double>& xs) {
  os << tag << ' ' << xs.size() << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << format_double(xs[i]) << ((i + 1) % 8 == 0 ? '\n' : ' ');
  if (xs.size() % 8 != 0) os << '\n';
}

std::string next_token(std::istream& is) {
  std::string tok;
  if (!(is >> tok)) throw std::runtime_error("checkpoint: truncated file");
  return tok;
}

double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw std::runtime_error("checkpoint: bad number '" + tok + "'");
  return v;
}

long long parse_int(const std::string& tok) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("checkpoint: bad integer '" + tok + "'");
  }
}

std::vector<double> read_block(std::istream& is, const char* tag,
                               std::size_t expected) {
  if (next_token(is) != tag)
    throw std::runtime_error(std::string("checkpoint: expected ") + tag);
  const long long n = parse_int(next_token(is));
  if (n < 0 || std::size_t(n) != expected)
    throw std::runtime_error(std::string("checkpoint: ") + tag +
                             " count does not match the layer sizes");
  std::vector<double> xs(expected);
  for (double& x : xs) x = parse_double(next_token(is));
  return xs;
}

}  // namespace

void save_checkpoint(std::ostream& os, const ValueNetwork& network,
                     std::uint64_t train_seed) {
  os << "valuenet 1\n";
  os << "layers " << network.layer_sizes().size();
  for (int n : network.layer_sizes()) os << ' ' << n;
  os << '\n';
  os << "learning_rate " << format_double(network.learning_rate()) << '\n';
  os << "seed " << train_seed << '\n';
  os << "step " << network.steps_taken() << '\n';
  write_block(os, "params", network.parameters());
  write_block(os, "moment1", network.moment1());
  write_block(os, "moment2", network.moment2());
  os << "end\n";
}

Checkpoint load_checkpoint(std::istream& is) {
  if (next_token(is) != "valuenet")
    throw std::runtime_error("checkpoint: unrecognized header");
  if (parse_int(next_token(is)) != 1)
    throw std::runtime_error("checkpoint: unsupported version");

  if (next_token(is) != "layers")
    throw std::runtime_error("checkpoint: expected layers");
  const long long n_layers = parse_int(next_token(is));
  if (n_layers < 2 || n_layers > 64)
    throw std::runtime_error("checkpoint: implausible layer count");
  std::vector<int> sizes;
  for (long long i = 0; i < n_layers; ++i) {
    const long long s = parse_int(next_token(is));
    if (s < 1 || s > 1'000'000)
      throw std::runtime_error("checkpoint: implausible layer size");
    sizes.push_back(int(s));
  }

  if (next_token(is) != "learning_rate")
    throw std::runtime_error("checkpoint: expected learning_rate");
  parse_double(next_token(is));  // informational; the rate is fixed

  if (next_token(is) != "seed")
    throw std::runtime_error("checkpoint: expected seed");
  const long long seed = parse_int(next_token(is));

  if (next_token(is) != "step")
    throw std::runtime_error("checkpoint: expected step");
  const long long step = parse_int(next_token(is));
  if (step < 0) throw std::runtime_error("checkpoint: negative step");

  ValueNetwork net(sizes, 0);
  net.set_parameters(read_block(is, "params", net.parameter_count()));
  std::vector<double> m = read_block(is, "moment1", net.parameter_count());
  std::vector<double> v = read_block(is, "moment2", net.parameter_count());
  net.restore_optimizer(std::move(m), std::move(v), step);
  if (next_token(is) != "end")
    throw std::runtime_error("checkpoint: missing end marker");
  return Checkpoint{std::move(net), std::uint64_t(seed)};
}

}  // namespace evrp
