#pragma once

// PPO-driven design space exploration with weighted rewards, constraint
// penalties, Pareto-front extraction and a grid-search baseline.

#include <array>
#include <map>
#include <optional>

#include "a3gnn/design_space.hpp"
#include "a3gnn/mlp.hpp"
#include "a3gnn/rng.hpp"
#include "a3gnn/surrogate.hpp"

namespace a3gnn::tuner {

using surrogate::Evaluator;

struct PpoHyper {
  double clip = 0.2;
  double discount = 0.0;  // myopic TD: the state's value IS its reward level
  double policy_lr = 0.12;
  double value_lr = 0.25;
  double momentum = 0.9;
  std::uint32_t rollout = 10;
  std::uint32_t epochs_per_update = 24;
  std::uint32_t hidden = 32;
  double max_grad_norm = 1.0;      // global-norm clip on both networks
  double hold_bias = 0.7;          // initial logit bias toward the hold action
  double pullback = 0.15;          // walk resumes from the best point when the
                                   // current reward falls this far below it
  std::uint32_t stale_limit = 20;  // unimproved evaluations before stopping
};

struct TunerConfig {
  // Priority vector over [thr, mem, acc]; mem is weighted negatively by
  // convention.
  std::array<double, 3> weights{1.0, 0.0, 0.0};
  std::optional<double> mem_max;  // bytes
  std::optional<double> acc_min;
  std::uint64_t budget = 100;  // distinct design-point evaluations
  // Reference ranges for min-max normalizing metrics into [0,1].
  double thr_lo = 0.0, thr_hi = 1.0;
  double mem_lo = 0.0, mem_hi = 1.0;
  double acc_lo = 0.0, acc_hi = 1.0;
  PpoHyper ppo;
};

constexpr double kConstraintPenalty = -1e3;

bool feasible(const Metrics& m, const TunerConfig& cfg);

// Constraint violation -> fixed penalty; otherwise w . m_normalized.
double reward(const Metrics& m, const TunerConfig& cfg);

// Normalized knob indices followed by normalized metrics; fixed length 10.
std::vector<double> encode_state(const DesignSpace& space, const DesignPoint& p,
                                const Metrics& m, const TunerConfig& cfg);

// Per-knob increment in {-1,0,+1}, clamped to grid bounds.
DesignPoint apply_action(const DesignPoint& p, const std::array<int, kNumKnobs>& a,
                         const DesignSpace& space);

struct PPOAgent {
  Mlp policy;  // state -> kNumKnobs x 3 logits
  Mlp value;   // state -> scalar

  static PPOAgent create(std::uint32_t state_dim, const PpoHyper& hyper, std::uint64_t seed);

  struct ActionSample {
    std::array<int, kNumKnobs> action;  // deltas in {-1,0,+1}
    double log_prob;
  };
  ActionSample act(std::span<const double> state, RngStream& rng) const;
  double log_prob(std::span<const double> state, const std::array<int, kNumKnobs>& a) const;
  double value_of(std::span<const double> state) const;
};

struct Experience {
  std::vector<double> state;
  std::array<int, kNumKnobs> action;
  double reward;
  std::vector<double> next_state;
  double old_log_prob;
};

struct PpoLosses {
  double policy_loss = 0.0;
  double value_loss = 0.0;
};

// Loss evaluation only. policy: -mean(min(rho*A, clip(rho)*A)); value: mean
// squared TD error with A = R + g*V(s') - V(s).
PpoLosses ppo_losses(const PPOAgent& agent, const std::vector<Experience>& buffer,
                     const PpoHyper& hyper);

// Runs epochs_per_update full-batch gradient steps; returns the last losses.
PpoLosses ppo_update(PPOAgent& agent, const std::vector<Experience>& buffer,
                     const PpoHyper& hyper);

struct TuneTraceRow {
  std::uint64_t step = 0;
  DesignPoint point;
  Metrics metrics;
  double reward = 0.0;
  double best_so_far = 0.0;
  bool feasible = false;
  bool fresh_evaluation = false;
};

struct TuneResult {
  bool found_feasible = false;
  DesignPoint best_point;
  Metrics best_metrics;
  double best_reward = 0.0;
  std::uint64_t evaluations_used = 0;
  std::uint64_t steps_taken = 0;
  std::vector<TuneTraceRow> trace;
  std::vector<std::pair<DesignPoint, Metrics>> pareto;
};

TuneResult tune(const DesignSpace& space, const Evaluator& evaluator, const TunerConfig& cfg,
                std::uint64_t seed);

struct GridResult {
  bool found_feasible = false;
  DesignPoint best_point;
  Metrics best_metrics;
  double best_reward = 0.0;
  std::uint64_t evaluations = 0;
};

// Exhaustive argmax over feasible points; ties keep the lexicographically
// smallest index vector.
GridResult grid_search(const DesignSpace& space, const Evaluator& evaluator,
                       const TunerConfig& cfg);

// Non-dominated subset: maximize thr and acc, minimize mem; duplicates
// collapsed.
std::vector<std::pair<DesignPoint, Metrics>> pareto_front(
    const std::vector<std::pair<DesignPoint, Metrics>>& evaluations);

struct RecheckResult {
  bool ok = false;
  DesignPoint point;
  Metrics predicted;
  Metrics ground_truth;
};

// Final ground-truth re-check of a recommendation. Candidates are tried in
// descending reward order until one satisfies the constraints on ground
// truth; surrogate/truth disagreements are reported via `ok` on exhaustion.
RecheckResult recheck_recommendation(const TuneResult& result, const Evaluator& ground_truth,
                                     const TunerConfig& cfg);

void write_tune_trace_csv(const TuneResult& r, const DesignSpace& space,
                          const std::string& path);
void write_pareto_csv(const std::vector<std::pair<DesignPoint, Metrics>>& front,
                      const DesignSpace& space, const std::string& path);

}  // namespace a3gnn::tuner
