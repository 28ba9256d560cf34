// PPO agent internals: state encoding, reward shaping, clipped-objective
// update.

#include <algorithm>
#include <cmath>

#include "a3gnn/tuner.hpp"

namespace a3gnn::tuner {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double norm_range(double v, double lo, double hi) {
  return hi > lo ? clamp01((v - lo) / (hi - lo)) : 0.0;
}

std::array<double, 3> normalize_metrics(const Metrics& m, const TunerConfig& cfg) {
  return {norm_range(m.throughput_eps, cfg.thr_lo, cfg.thr_hi),
          norm_range(m.memory_bytes, cfg.mem_lo, cfg.mem_hi),
          norm_range(m.accuracy, cfg.acc_lo, cfg.acc_hi)};
}

}  // namespace

bool feasible(const Metrics& m, const TunerConfig& cfg) {
  if (cfg.mem_max && m.memory_bytes > *cfg.mem_max) return false;
  if (cfg.acc_min && m.accuracy < *cfg.acc_min) return false;
  return true;
}

double reward(const Metrics& m, const TunerConfig& cfg) {
  if (!feasible(m, cfg)) return kConstraintPenalty;
  const auto n = normalize_metrics(m, cfg);
  return cfg.weights[0] * n[0] + cfg.weights[1] * n[1] + cfg.weights[2] * n[2];
}

std::vector<double> encode_state(const DesignSpace& space, const DesignPoint& p,
                                const Metrics& m, const TunerConfig& cfg) {
  check_point(space, p);
  std::vector<double> s;
  s.reserve(kNumKnobs + 3);
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    const std::size_t levels = space.level_count(k);
    s.push_back(levels > 1 ? static_cast<double>(p.idx[k]) / static_cast<double>(levels - 1)
                           : 0.0);
  }
  for (double v : normalize_metrics(m, cfg)) s.push_back(v);
  return s;
}

DesignPoint apply_action(const DesignPoint& p, const std::array<int, kNumKnobs>& a,
                         const DesignSpace& space) {
  DesignPoint out = p;
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    const std::int64_t levels = static_cast<std::int64_t>(space.level_count(k));
    const std::int64_t idx =
        std::clamp<std::int64_t>(static_cast<std::int64_t>(p.idx[k]) + a[k], 0, levels - 1);
    out.idx[k] = static_cast<std::uint32_t>(idx);
  }
  return out;
}

PPOAgent PPOAgent::create(std::uint32_t state_dim, const PpoHyper& hyper, std::uint64_t seed) {
  PPOAgent agent;
  agent.policy = Mlp::create(state_dim, hyper.hidden, kNumKnobs * 3, hash2(seed, 0x9014));
  agent.value = Mlp::create(state_dim, hyper.hidden, 1, hash2(seed, 0x7a13));
  // Bias the hold action up front: single-knob moves keep the walk local and
  // revisits are free under memoization.
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    agent.policy.b3[k * 3 + 1] = hyper.hold_bias;
  }
  return agent;
}

namespace {

// Per-knob probabilities from a 3-way logit group.
void knob_softmax(const double* logits, double* p) {
  const double mx = std::max({logits[0], logits[1], logits[2]});
  double denom = 0.0;
  for (int j = 0; j < 3; ++j) {
    p[j] = std::exp(logits[j] - mx);
    denom += p[j];
  }
  for (int j = 0; j < 3; ++j) p[j] = std::max(p[j] / denom, 1e-12);
}

}  // namespace

PPOAgent::ActionSample PPOAgent::act(std::span<const double> state, RngStream& rng) const {
  const Mlp::Activations fwd = policy.forward(state);
  ActionSample out{};
  out.log_prob = 0.0;
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    double p[3];
    knob_softmax(fwd.out.data() + k * 3, p);
    const double r = rng.next_unit();
    int choice = r < p[0] ? 0 : (r < p[0] + p[1] ? 1 : 2);
    out.action[k] = choice - 1;
    out.log_prob += std::log(p[choice]);
  }
  return out;
}

double PPOAgent::log_prob(std::span<const double> state,
                          const std::array<int, kNumKnobs>& a) const {
  const Mlp::Activations fwd = policy.forward(state);
  double lp = 0.0;
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    double p[3];
    knob_softmax(fwd.out.data() + k * 3, p);
    lp += std::log(p[a[k] + 1]);
  }
  return lp;
}

double PPOAgent::value_of(std::span<const double> state) const {
  return value.forward(state).out[0];
}

namespace {

std::vector<double> advantages(const PPOAgent& agent, const std::vector<Experience>& buffer,
                               const PpoHyper& hyper) {
  std::vector<double> adv(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    adv[i] = buffer[i].reward + hyper.discount * agent.value_of(buffer[i].next_state) -
             agent.value_of(buffer[i].state);
  }
  return adv;
}

PpoLosses losses_and_grads(PPOAgent& agent, const std::vector<Experience>& buffer,
                           const std::vector<double>& adv,
                           const std::vector<double>& value_targets, const PpoHyper& hyper,
                           Mlp::Grad* policy_grad, Mlp::Grad* value_grad) {
  PpoLosses losses;
  const double inv_n = 1.0 / static_cast<double>(buffer.size());

  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Experience& e = buffer[i];
    const Mlp::Activations fwd = agent.policy.forward(e.state);
    double logp = 0.0;
    double probs[kNumKnobs][3];
    for (std::size_t k = 0; k < kNumKnobs; ++k) {
      knob_softmax(fwd.out.data() + k * 3, probs[k]);
      logp += std::log(probs[k][e.action[k] + 1]);
    }
    const double rho = std::exp(logp - e.old_log_prob);
    const double surr1 = rho * adv[i];
    const double rho_clip = std::clamp(rho, 1.0 - hyper.clip, 1.0 + hyper.clip);
    const double surr2 = rho_clip * adv[i];
    losses.policy_loss += -std::min(surr1, surr2) * inv_n;

    if (policy_grad != nullptr && surr1 <= surr2) {
      // d(-surr1)/dlogp = -A*rho; clipped branch has zero gradient.
      const double coef = -adv[i] * rho * inv_n;
      std::vector<double> dlogits(kNumKnobs * 3);
      for (std::size_t k = 0; k < kNumKnobs; ++k) {
        for (int j = 0; j < 3; ++j) {
          const double onehot = (j == e.action[k] + 1) ? 1.0 : 0.0;
          dlogits[k * 3 + j] = coef * (onehot - probs[k][j]);
        }
      }
      agent.policy.backward(e.state, fwd, dlogits, *policy_grad);
    }

    // TD targets are frozen at update start; epochs regress toward them.
    const Mlp::Activations vfwd = agent.value.forward(e.state);
    const double err = vfwd.out[0] - value_targets[i];
    losses.value_loss += err * err * inv_n;
    if (value_grad != nullptr) {
      const double dout = 2.0 * err * inv_n;
      agent.value.backward(e.state, vfwd, std::span<const double>(&dout, 1), *value_grad);
    }
  }
  return losses;
}

void clip_grad_norm(Mlp::Grad& g, double max_norm) {
  double sq = 0.0;
  for (const auto* v : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3}) {
    for (double x : *v) sq += x * x;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto* v : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3}) {
      for (double& x : *v) x *= scale;
    }
  }
}

std::vector<double> td_targets(const PPOAgent& agent, const std::vector<Experience>& buffer,
                               const PpoHyper& hyper) {
  std::vector<double> t(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    t[i] = buffer[i].reward + hyper.discount * agent.value_of(buffer[i].next_state);
  }
  return t;
}

}  // namespace

PpoLosses ppo_losses(const PPOAgent& agent, const std::vector<Experience>& buffer,
                     const PpoHyper& hyper) {
  if (buffer.empty()) throw ParameterError("ppo_losses: empty buffer");
  const std::vector<double> adv = advantages(agent, buffer, hyper);
  const std::vector<double> targets = td_targets(agent, buffer, hyper);
  PPOAgent& mut = const_cast<PPOAgent&>(agent);  // forward-only use
  return losses_and_grads(mut, buffer, adv, targets, hyper, nullptr, nullptr);
}

PpoLosses ppo_update(PPOAgent& agent, const std::vector<Experience>& buffer,
                     const PpoHyper& hyper) {
  if (buffer.empty()) throw ParameterError("ppo_update: empty buffer");
  const std::vector<double> adv = advantages(agent, buffer, hyper);
  const std::vector<double> targets = td_targets(agent, buffer, hyper);

  Mlp::Grad pgrad, vgrad;
  pgrad.init(agent.policy);
  vgrad.init(agent.value);
  Mlp::Momentum pvel, vvel;
  PpoLosses last;
  for (std::uint32_t epoch = 0; epoch < hyper.epochs_per_update; ++epoch) {
    pgrad.zero();
    vgrad.zero();
    last = losses_and_grads(agent, buffer, adv, targets, hyper, &pgrad, &vgrad);
    clip_grad_norm(pgrad, hyper.max_grad_norm);
    clip_grad_norm(vgrad, hyper.max_grad_norm);
    agent.policy.apply(pgrad, pvel, hyper.policy_lr, hyper.momentum);
    agent.value.apply(vgrad, vvel, hyper.value_lr, hyper.momentum);
  }
  return last;
}

}  // namespace a3gnn::tuner
