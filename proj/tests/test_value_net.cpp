#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "evrp/value_net.hpp"

using namespace evrp;

namespace {

double batch_mse(const ValueNetwork& net,
                 const std::vector<std::vector<double>>& inputs,
                 const std::vector<double>& targets) {
  double s = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double e = net.forward(inputs[k]) - targets[k];
    s += e * e;
  }
  return s / double(inputs.size());
}

// Smallest |preactivation| across the hidden layers. Central differences are
// only a valid derivative oracle while no rectifier changes state inside the
// stencil, so gradient checks must stay clear of the kinks.
double closest_kink(const ValueNetwork& net, const std::vector<double>& x) {
  const std::vector<int> sz = net.layer_sizes();
  const std::vector<double> p = net.parameters();
  double closest = std::numeric_limits<double>::infinity();
  std::size_t off = 0;
  std::vector<double> a = x;
  for (std::size_t l = 0; l + 1 < sz.size(); ++l) {
    const int in = sz[l];
    const int out = sz[l + 1];
    const double* w = p.data() + off;
    const double* b = p.data() + off + std::size_t(out) * std::size_t(in);
    off += std::size_t(out) * std::size_t(in) + std::size_t(out);
    std::vector<double> z(std::size_t(out), 0.0);
    for (int r = 0; r < out; ++r) {
      double s = b[r];
      for (int c = 0; c < in; ++c)
        s += w[std::size_t(r) * std::size_t(in) + std::size_t(c)] *
             a[std::size_t(c)];
      z[std::size_t(r)] = s;
    }
    if (l + 2 < sz.size()) {  // last layer is linear, no kink
      for (double v : z) closest = std::min(closest, std::abs(v));
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
    a = std::move(z);
  }
  return closest;
}

}  // namespace

TEST_CASE("network construction is validated") {
  CHECK_THROWS_AS(ValueNetwork({5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(ValueNetwork({5, 3}, 1), std::invalid_argument);  // out != 1
  CHECK_THROWS_AS(ValueNetwork({5, 0, 1}, 1), std::invalid_argument);
  const ValueNetwork net({5, 12, 6, 3, 1}, 1);
  // (5*12+12) + (12*6+6) + (6*3+3) + (3*1+1)
  CHECK(net.parameter_count() == 175);
  CHECK_THROWS_AS(net.forward({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("zero parameters give a zero output, lone output bias passes through") {
  ValueNetwork net({5, 12, 6, 3, 1}, 7);
  std::vector<double> flat(net.parameter_count(), 0.0);
  net.set_parameters(flat);
  CHECK(net.forward({0.3, 0.1, 1.0, 0.0, 0.7}) == 0.0);
  CHECK(net.forward({-4.0, 2.0, 0.0, 1.0, 0.0}) == 0.0);

  flat.back() = 0.625;  // the output unit's bias is the last parameter
  net.set_parameters(flat);
  CHECK(net.forward({0.3, 0.1, 1.0, 0.0, 0.7}) == 0.625);
}

TEST_CASE("forward pass matches hand arithmetic on a 2-2-1 network") {
  ValueNetwork net({2, 2, 1}, 0);
  // Layout: w0 row-major (2x2), b0, w1 (1x2), b1. Dyadic values keep the
  // arithmetic exact.
  net.set_parameters({1.0, -1.0, 0.5, 2.0, 0.25, -0.5, 2.0, -3.0, 0.125});
  // z0 = (1*1 - 1*0.5 + 0.25, 0.5*1 + 2*0.5 - 0.5) = (0.75, 1.0), both kept
  // by the rectifier; out = 2*0.75 - 3*1.0 + 0.125 = -1.375.
  CHECK(net.forward({1.0, 0.5}) == -1.375);
  // Both preactivations negative: the rectifier zeroes them, bias remains.
  CHECK(net.forward({-1.0, 0.0}) == 0.125);
}

TEST_CASE("analytic gradients match central finite differences") {
  double worst = 0.0;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> in(0.0, 1.0);
  std::uniform_real_distribution<double> tgt(-1.0, 1.0);

  // A parameter step of h moves any preactivation by well under 2e-4 on
  // this architecture, so a 1e-3 kink guard keeps every rectifier in a
  // fixed state across the stencil. Trials that sit closer are redrawn.
  const double h = 1e-5;
  const double kink_guard = 1e-3;

  int accepted = 0;
  int redrawn = 0;
  std::uint64_t net_seed = 0;
  while (accepted < 100) {
    ValueNetwork net({5, 12, 6, 3, 1}, ++net_seed);
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    bool near_kink = false;
    for (int k = 0; k < 3; ++k) {
      inputs.push_back({in(rng), in(rng), in(rng), in(rng), in(rng)});
      targets.push_back(tgt(rng));
      near_kink |= closest_kink(net, inputs.back()) < kink_guard;
    }
    if (near_kink) {
      ++redrawn;
      continue;
    }
    ++accepted;

    const std::vector<double> grad = net.gradient(inputs, targets);
    std::vector<double> flat = net.parameters();
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double keep = flat[i];
      flat[i] = keep + h;
      net.set_parameters(flat);
      const double up = batch_mse(net, inputs, targets);
      flat[i] = keep - h;
      net.set_parameters(flat);
      const double dn = batch_mse(net, inputs, targets);
      flat[i] = keep;
      net.set_parameters(flat);

      const double fd = (up - dn) / (2.0 * h);
      // The denominator floor keeps cancellation noise on near-zero
      // components from masquerading as relative error.
      const double rel = std::abs(grad[i] - fd) /
                         std::max({std::abs(grad[i]), std::abs(fd), 1e-4});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
  CHECK(redrawn < 100);  // kink-adjacent draws are the exception, not the rule
}

TEST_CASE("train_step on an already-fit batch is a no-op with zero loss") {
  ValueNetwork net({5, 12, 6, 3, 1}, 11);
  std::vector<double> zeros(net.parameter_count(), 0.0);
  net.set_parameters(zeros);
  const std::vector<std::vector<double>> inputs{{0.1, 0.2, 1.0, 0.0, 0.3},
                                                {0.9, 0.0, 0.0, 1.0, 0.5}};
  const std::vector<double> targets{0.0, 0.0};  // q already equals reward
  CHECK(net.train_step(inputs, targets) == 0.0);
  CHECK(net.parameters() == zeros);  // zero gradient moves nothing
  CHECK(net.steps_taken() == 1);
}

TEST_CASE("train_step reports the pre-update error") {
  ValueNetwork net({2, 2, 1}, 3);
  net.set_parameters(std::vector<double>(net.parameter_count(), 0.0));
  const double loss = net.train_step({{0.5, 0.5}}, {1.0});
  CHECK(loss == 1.0);  // q was 0, target 1
}

TEST_CASE("repeated training converges to a fixed target") {
  ValueNetwork net({5, 12, 6, 3, 1}, 3);
  const std::vector<std::vector<double>> inputs{{0.4, 0.1, 1.0, 1.0, 0.2}};
  const std::vector<double> targets{0.7};
  for (int i = 0; i < 5000; ++i) net.train_step(inputs, targets);
  CHECK(std::abs(net.forward(inputs[0]) - 0.7) < 1e-3);
}

TEST_CASE("parameter vector round-trips and rejects bad sizes") {
  ValueNetwork net({3, 4, 1}, 21);
  const std::vector<double> flat = net.parameters();
  CHECK(flat.size() == net.parameter_count());
  ValueNetwork other({3, 4, 1}, 22);
  other.set_parameters(flat);
  CHECK(other.parameters() == flat);
  CHECK(other.forward({0.1, 0.2, 0.3}) == net.forward({0.1, 0.2, 0.3}));
  CHECK_THROWS_AS(other.set_parameters({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("checkpoints restore the network bit for bit") {
  ValueNetwork net({5, 12, 6, 3, 1}, 77);
  // Take a few steps so the optimizer state is nontrivial.
  const std::vector<std::vector<double>> inputs{{0.2, 0.0, 1.0, 1.0, 0.1},
                                                {0.8, 0.3, 0.0, 0.0, 0.6}};
  const std::vector<double> targets{0.15, -0.4};
  for (int i = 0; i < 10; ++i) net.train_step(inputs, targets);

  std::stringstream file;
  save_checkpoint(file, net, 424242);
  Checkpoint loaded = load_checkpoint(file);

  CHECK(loaded.train_seed == 424242);
  CHECK(loaded.network.layer_sizes() == net.layer_sizes());
  CHECK(loaded.network.parameters() == net.parameters());
  CHECK(loaded.network.moment1() == net.moment1());
  CHECK(loaded.network.moment2() == net.moment2());
  CHECK(loaded.network.steps_taken() == net.steps_taken());

  // Continued training diverges nowhere: optimizer state came along.
  const double l1 = net.train_step(inputs, targets);
  const double l2 = loaded.network.train_step(inputs, targets);
  CHECK(l1 == l2);
  CHECK(loaded.network.parameters() == net.parameters());
}

TEST_CASE("checkpoint loading rejects malformed files") {
  ValueNetwork net({2, 3, 1}, 5);
  std::stringstream file;
  save_checkpoint(file, net, 9);
  const std::string good = file.str();

  SUBCASE("unknown header") {
    std::stringstream bad("valuenot 1\n");
    CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
  }
  SUBCASE("unsupported version") {
    std::string text = good;
    text.replace(text.find("valuenet 1"), 10, "valuenet 2");
    std::stringstream bad(text);
    CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
  }
  SUBCASE("layer sizes that do not match the parameter block") {
    std::string text = good;
    const std::string layers = "layers 3 2 3 1";
    text.replace(text.find(layers), layers.size(), "layers 3 2 4 1");
    std::stringstream bad(text);
    CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
  }
  SUBCASE("truncated file") {
    std::stringstream bad(good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(bad), std::runtime_error);
  }
  SUBCASE("the pristine file still loads") {
    std::stringstream ok(good);
    CHECK(load_checkpoint(ok).network.parameters() == net.parameters());
  }
}
