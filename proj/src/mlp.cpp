#include "a3gnn/mlp.hpp"

#include <cmath>

#include "a3gnn/kernels.hpp"
#include "a3gnn/rng.hpp"

namespace a3gnn::tuner {

Mlp Mlp::create(std::uint32_t n_in, std::uint32_t n_hidden, std::uint32_t n_out,
                std::uint64_t seed) {
  Mlp net;
  net.n_in = n_in;
  net.n_hidden = n_hidden;
  net.n_out = n_out;
  RngStream rng(seed, 0x1b9);
  auto glorot = [&rng](std::vector<double>& w, std::uint32_t fi, std::uint32_t fo) {
    const double a = std::sqrt(6.0 / (static_cast<double>(fi) + fo));
    w.resize(static_cast<std::size_t>(fi) * fo);
    for (double& x : w) x = (2.0 * rng.next_unit() - 1.0) * a;
  };
  glorot(net.w1, n_in, n_hidden);
  glorot(net.w2, n_hidden, n_hidden);
  glorot(net.w3, n_hidden, n_out);
  net.b1.assign(n_hidden, 0.0);
  net.b2.assign(n_hidden, 0.0);
  net.b3.assign(n_out, 0.0);
  return net;
}

Mlp::Activations Mlp::forward(std::span<const double> x) const {
  if (x.size() != n_in) throw ParameterError("mlp: input size mismatch");
  Activations act;
  act.h1 = b1;
  kernels::matmul_accum(x.data(), w1.data(), act.h1.data(), 1, n_in, n_hidden);
  for (double& v : act.h1) v = std::tanh(v);
  act.h2 = b2;
  kernels::matmul_accum(act.h1.data(), w2.data(), act.h2.data(), 1, n_hidden, n_hidden);
  for (double& v : act.h2) v = std::tanh(v);
  act.out = b3;
  kernels::matmul_accum(act.h2.data(), w3.data(), act.out.data(), 1, n_hidden, n_out);
  return act;
}

void Mlp::Grad::init(const Mlp& net) {
  w1.assign(net.w1.size(), 0.0);
  b1.assign(net.b1.size(), 0.0);
  w2.assign(net.w2.size(), 0.0);
  b2.assign(net.b2.size(), 0.0);
  w3.assign(net.w3.size(), 0.0);
  b3.assign(net.b3.size(), 0.0);
}

void Mlp::Grad::zero() {
  for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3}) std::fill(v->begin(), v->end(), 0.0);
}

void Mlp::backward(std::span<const double> x, const Activations& act,
                   std::span<const double> dout, Grad& grad) const {
  // Output layer.
  kernels::matmul_at_b_accum(act.h2.data(), dout.data(), grad.w3.data(), 1, n_hidden, n_out);
  kernels::add(dout.data(), grad.b3.data(), n_out);
  std::vector<double> dh2(n_hidden, 0.0);
  kernels::matmul_a_bt_accum(dout.data(), w3.data(), dh2.data(), 1, n_out, n_hidden);
  for (std::uint32_t i = 0; i < n_hidden; ++i) dh2[i] *= 1.0 - act.h2[i] * act.h2[i];

  kernels::matmul_at_b_accum(act.h1.data(), dh2.data(), grad.w2.data(), 1, n_hidden, n_hidden);
  kernels::add(dh2.data(), grad.b2.data(), n_hidden);
  std::vector<double> dh1(n_hidden, 0.0);
  kernels::matmul_a_bt_accum(dh2.data(), w2.data(), dh1.data(), 1, n_hidden, n_hidden);
  for (std::uint32_t i = 0; i < n_hidden; ++i) dh1[i] *= 1.0 - act.h1[i] * act.h1[i];

  kernels::matmul_at_b_accum(x.data(), dh1.data(), grad.w1.data(), 1, n_in, n_hidden);
  kernels::add(dh1.data(), grad.b1.data(), n_hidden);
}

void Mlp::apply(const Grad& grad, Momentum& vel, double lr, double mu) {
  if (vel.w1.empty()) {
    vel.w1.assign(w1.size(), 0.0);
    vel.b1.assign(b1.size(), 0.0);
    vel.w2.assign(w2.size(), 0.0);
    vel.b2.assign(b2.size(), 0.0);
    vel.w3.assign(w3.size(), 0.0);
    vel.b3.assign(b3.size(), 0.0);
  }
  auto step = [&](std::vector<double>& p, std::vector<double>& v, const std::vector<double>& g) {
    kernels::scale(v.data(), mu, v.size());
    kernels::add(g.data(), v.data(), v.size());
    kernels::axpy(-lr, v.data(), p.data(), p.size());
  };
  step(w1, vel.w1, grad.w1);
  step(b1, vel.b1, grad.b1);
  step(w2, vel.w2, grad.w2);
  step(b2, vel.b2, grad.b2);
  step(w3, vel.w3, grad.w3);
  step(b3, vel.b3, grad.b3);
}

std::vector<double*> Mlp::param_blocks() {
  return {w1.data(), b1.data(), w2.data(), b2.data(), w3.data(), b3.data()};
}

std::vector<std::size_t> Mlp::param_sizes() const {
  return {w1.size(), b1.size(), w2.size(), b2.size(), w3.size(), b3.size()};
}

}  // namespace a3gnn::tuner
