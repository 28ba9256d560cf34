// The tuning loop (Markov-decision formulation of the knob walk), grid-search
// baseline and Pareto machinery.

#include <algorithm>
#include <fstream>

#include "a3gnn/tuner.hpp"

namespace a3gnn::tuner {

namespace {

struct PointLess {
  bool operator()(const DesignPoint& a, const DesignPoint& b) const {
    return a.idx < b.idx;
  }
};

DesignPoint random_point(const DesignSpace& space, RngStream& rng) {
  DesignPoint p;
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    p.idx[k] = rng.next_below(static_cast<std::uint32_t>(space.level_count(k)));
  }
  return p;
}

}  // namespace

TuneResult tune(const DesignSpace& space, const Evaluator& evaluator, const TunerConfig& cfg,
                std::uint64_t seed) {
  space.validate();
  if (cfg.budget < 1) throw ParameterError("tune: budget must be >= 1");
  if (!(cfg.ppo.clip > 0.0 && cfg.ppo.clip < 1.0)) {
    throw ParameterError("tune: clip must be in (0,1)");
  }

  TuneResult result;
  result.best_reward = kConstraintPenalty;

  std::map<DesignPoint, Metrics, PointLess> memo;
  std::uint64_t stale = 0;
  bool out_of_budget = false;

  // Evaluate through the memo: only new points consume budget or staleness.
  auto evaluate = [&](const DesignPoint& p) -> std::optional<Metrics> {
    auto it = memo.find(p);
    if (it != memo.end()) {
      result.trace.push_back({result.steps_taken, p, it->second, reward(it->second, cfg),
                              result.best_reward, feasible(it->second, cfg), false});
      return it->second;
    }
    if (result.evaluations_used >= cfg.budget) {
      out_of_budget = true;
      return std::nullopt;
    }
    const Metrics m = evaluator(p);
    ++result.evaluations_used;
    memo.emplace(p, m);
    const double r = reward(m, cfg);
    const bool ok = feasible(m, cfg);
    if (ok && (r > result.best_reward || !result.found_feasible)) {
      result.best_reward = r;
      result.best_point = p;
      result.best_metrics = m;
      result.found_feasible = true;
      stale = 0;
    } else {
      ++stale;  // unimproved budget-consuming evaluation
    }
    result.trace.push_back({result.steps_taken, p, m, r, result.best_reward, ok, true});
    return m;
  };

  RngStream start_rng(seed, 0xe415);
  RngStream action_rng(seed, 0xac71);
  PPOAgent agent = PPOAgent::create(static_cast<std::uint32_t>(kNumKnobs + 3), cfg.ppo,
                                    hash2(seed, 0xa6e7));
  std::vector<Experience> buffer;
  const std::uint64_t total_points = space.total_points();
  const std::uint64_t step_cap = std::max<std::uint64_t>(1000, cfg.budget * 100);

  // One continuous trajectory: act, clip, predict, reward, update every
  // rollout-length steps. Every step is an evaluation for the staleness rule;
  // only previously unseen points consume the evaluator budget.
  DesignPoint p = random_point(space, start_rng);
  if (auto m0 = evaluate(p)) {
    std::vector<double> state = encode_state(space, p, *m0, cfg);
    while (!out_of_budget && stale < cfg.ppo.stale_limit && memo.size() < total_points &&
           result.steps_taken < step_cap) {
      ++result.steps_taken;
      const PPOAgent::ActionSample a = agent.act(state, action_rng);
      const DesignPoint p_next = apply_action(p, a.action, space);
      const auto m_next = evaluate(p_next);
      if (!m_next) break;
      const double r = reward(*m_next, cfg);
      std::vector<double> next_state = encode_state(space, p_next, *m_next, cfg);
      buffer.push_back({state, a.action, r, next_state, a.log_prob});
      if (result.found_feasible && result.best_reward - r > cfg.ppo.pullback) {
        // Too deep below the incumbent: resume the walk from the best point.
        p = result.best_point;
        state = encode_state(space, p, result.best_metrics, cfg);
      } else {
        p = p_next;
        state = std::move(next_state);
      }
      if (buffer.size() >= cfg.ppo.rollout) {
        ppo_update(agent, buffer, cfg.ppo);
        buffer.clear();
      }
    }
    if (!buffer.empty()) ppo_update(agent, buffer, cfg.ppo);
  }

  std::vector<std::pair<DesignPoint, Metrics>> feasible_evals;
  for (const auto& [p, m] : memo) {
    if (feasible(m, cfg)) feasible_evals.emplace_back(p, m);
  }
  if (!feasible_evals.empty()) result.pareto = pareto_front(feasible_evals);
  return result;
}

GridResult grid_search(const DesignSpace& space, const Evaluator& evaluator,
                       const TunerConfig& cfg) {
  space.validate();
  GridResult result;
  result.best_reward = kConstraintPenalty;

  DesignPoint p;
  bool more = true;
  while (more) {
    const Metrics m = evaluator(p);
    ++result.evaluations;
    const double r = reward(m, cfg);
    // Strict improvement keeps the first (lexicographically smallest) argmax.
    if (feasible(m, cfg) && (r > result.best_reward || !result.found_feasible)) {
      result.best_reward = r;
      result.best_point = p;
      result.best_metrics = m;
      result.found_feasible = true;
    }
    // Odometer increment, last knob fastest.
    more = false;
    for (std::size_t k = kNumKnobs; k-- > 0;) {
      if (p.idx[k] + 1 < space.level_count(k)) {
        ++p.idx[k];
        for (std::size_t j = k + 1; j < kNumKnobs; ++j) p.idx[j] = 0;
        more = true;
        break;
      }
    }
  }
  return result;
}

std::vector<std::pair<DesignPoint, Metrics>> pareto_front(
    const std::vector<std::pair<DesignPoint, Metrics>>& evaluations) {
  if (evaluations.empty()) throw ParameterError("pareto_front: empty evaluation list");

  auto dominates = [](const Metrics& a, const Metrics& b) {
    const bool ge = a.throughput_eps >= b.throughput_eps && a.accuracy >= b.accuracy &&
                    a.memory_bytes <= b.memory_bytes;
    const bool strict = a.throughput_eps > b.throughput_eps || a.accuracy > b.accuracy ||
                        a.memory_bytes < b.memory_bytes;
    return ge && strict;
  };
  auto same = [](const Metrics& a, const Metrics& b) {
    return a.throughput_eps == b.throughput_eps && a.memory_bytes == b.memory_bytes &&
           a.accuracy == b.accuracy;
  };

  // Sort by descending throughput so dominators come early; keeps the scan
  // cheap on typical fronts.
  std::vector<std::size_t> order(evaluations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Metrics& ma = evaluations[a].second;
    const Metrics& mb = evaluations[b].second;
    if (ma.throughput_eps != mb.throughput_eps) return ma.throughput_eps > mb.throughput_eps;
    if (ma.memory_bytes != mb.memory_bytes) return ma.memory_bytes < mb.memory_bytes;
    if (ma.accuracy != mb.accuracy) return ma.accuracy > mb.accuracy;
    return a < b;
  });

  std::vector<std::pair<DesignPoint, Metrics>> front;
  for (std::size_t i : order) {
    const Metrics& m = evaluations[i].second;
    bool keep = true;
    for (const auto& kept : front) {
      if (dominates(kept.second, m) || same(kept.second, m)) {
        keep = false;
        break;
      }
    }
    if (keep) front.push_back(evaluations[i]);
  }
  return front;
}

RecheckResult recheck_recommendation(const TuneResult& result, const Evaluator& ground_truth,
                                     const TunerConfig& cfg) {
  RecheckResult out;
  if (!result.found_feasible) return out;

  std::vector<std::pair<DesignPoint, Metrics>> candidates;
  candidates.emplace_back(result.best_point, result.best_metrics);
  for (const auto& row : result.trace) {
    if (row.feasible) candidates.emplace_back(row.point, row.metrics);
  }
  std::sort(candidates.begin(), candidates.end(), [&](const auto& a, const auto& b) {
    return reward(a.second, cfg) > reward(b.second, cfg);
  });

  std::map<DesignPoint, bool, PointLess> tried;
  for (const auto& [p, m] : candidates) {
    auto [it, fresh] = tried.emplace(p, true);
    if (!fresh) continue;
    const Metrics truth = ground_truth(p);
    if (feasible(truth, cfg)) {
      out.ok = true;
      out.point = p;
      out.predicted = m;
      out.ground_truth = truth;
      return out;
    }
  }
  return out;
}

namespace {

void write_point_columns(std::ofstream& out, const DesignSpace& space, const DesignPoint& p) {
  const ResolvedDesign d = resolve(space, p);
  out << d.batch_size << "," << d.partitions << "," << d.bias_rate << ","
      << to_string(d.sampling_device) << "," << d.workers << "," << d.cache_volume << ","
      << to_string(d.mode);
}

}  // namespace

void write_tune_trace_csv(const TuneResult& r, const DesignSpace& space,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_tune_trace_csv: cannot open " + path);
  out << "step,batch_size,partitions,bias_rate,sampling_device,workers,cache_volume,mode,"
         "thr_eps,mem_bytes,acc,reward,best_so_far\n";
  for (const auto& row : r.trace) {
    out << row.step << ",";
    write_point_columns(out, space, row.point);
    out << "," << row.metrics.throughput_eps << "," << row.metrics.memory_bytes << ","
        << row.metrics.accuracy << "," << row.reward << "," << row.best_so_far << "\n";
  }
}

void write_pareto_csv(const std::vector<std::pair<DesignPoint, Metrics>>& front,
                      const DesignSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("write_pareto_csv: cannot open " + path);
  out << "batch_size,partitions,bias_rate,sampling_device,workers,cache_volume,mode,"
         "thr_eps,mem_bytes,acc\n";
  for (const auto& [p, m] : front) {
    write_point_columns(out, space, p);
    out << "," << m.throughput_eps << "," << m.memory_bytes << "," << m.accuracy << "\n";
  }
}

}  // namespace a3gnn::tuner
