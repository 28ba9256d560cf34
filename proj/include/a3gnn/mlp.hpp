#pragma once

// Minimal feed-forward net (2 tanh hidden layers, linear output) with
// hand-rolled backprop on the shared float kernels. Used by the PPO policy
// and value networks.

#include <span>
#include <vector>

#include "a3gnn/common.hpp"

namespace a3gnn::tuner {

struct Mlp {
  std::uint32_t n_in = 0, n_hidden = 0, n_out = 0;
  std::vector<double> w1, b1;  // in x hidden
  std::vector<double> w2, b2;  // hidden x hidden
  std::vector<double> w3, b3;  // hidden x out

  static Mlp create(std::uint32_t n_in, std::uint32_t n_hidden, std::uint32_t n_out,
                    std::uint64_t seed);

  struct Activations {
    std::vector<double> h1, h2, out;
  };
  Activations forward(std::span<const double> x) const;

  struct Grad {
    std::vector<double> w1, b1, w2, b2, w3, b3;
    void init(const Mlp& net);
    void zero();
  };

  // Accumulates into grad given dLoss/dout for one sample.
  void backward(std::span<const double> x, const Activations& act,
                std::span<const double> dout, Grad& grad) const;

  // SGD with momentum: v = mu*v + g; p -= lr*v.
  struct Momentum {
    std::vector<double> w1, b1, w2, b2, w3, b3;
  };
  void apply(const Grad& grad, Momentum& vel, double lr, double mu);

  // Flat parameter views, for finite-difference checks.
  std::vector<double*> param_blocks();
  std::vector<std::size_t> param_sizes() const;
};

}  // namespace a3gnn::tuner
