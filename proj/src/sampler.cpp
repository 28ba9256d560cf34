#include "a3gnn/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace a3gnn::sampling {

std::vector<NodeId> weighted_reservoir_sample(std::span<const NodeId> neighbors,
                                              std::span<const double> weights,
                                              std::uint32_t m, RngStream& rng) {
  if (neighbors.size() != weights.size()) {
    throw ParameterError("weighted_reservoir_sample: |neighbors| != |weights|");
  }
  if (m < 1) throw ParameterError("weighted_reservoir_sample: m must be >= 1");
  if (neighbors.empty()) return {};

  std::vector<NodeId> reservoir;
  std::vector<double> keys;
  reservoir.reserve(std::min<std::size_t>(m, neighbors.size()));
  keys.reserve(reservoir.capacity());
  std::size_t min_pos = 0;

  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const double w = weights[j];
    if (!(w > 0.0)) {
      throw ParameterError("weighted_reservoir_sample: weights must be positive");
    }
    const double k = std::pow(rng.next_unit(), 1.0 / w);
    if (reservoir.size() < m) {
      reservoir.push_back(neighbors[j]);
      keys.push_back(k);
      if (k < keys[min_pos]) min_pos = keys.size() - 1;
    } else if (k > keys[min_pos]) {  // strict: ties keep the incumbent
      reservoir[min_pos] = neighbors[j];
      keys[min_pos] = k;
      min_pos = static_cast<std::size_t>(
          std::min_element(keys.begin(), keys.end()) - keys.begin());
    }
  }
  return reservoir;
}

std::vector<NodeId> uniform_reservoir_sample(std::span<const NodeId> neighbors,
                                             std::uint32_t m, RngStream& rng) {
  if (m < 1) throw ParameterError("uniform_reservoir_sample: m must be >= 1");
  std::vector<NodeId> reservoir;
  reservoir.reserve(std::min<std::size_t>(m, neighbors.size()));
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    if (reservoir.size() < m) {
      reservoir.push_back(neighbors[j]);
    } else {
      const std::size_t r = rng.next_below(static_cast<std::uint32_t>(j + 1));
      if (r < m) reservoir[r] = neighbors[j];
    }
  }
  return reservoir;
}

std::vector<double> assign_weights(std::span<const NodeId> neighbors,
                                   const CacheState& cache, double gamma) {
  if (gamma < 1.0) throw ParameterError("assign_weights: gamma must be >= 1");
  std::vector<double> w(neighbors.size(), 1.0);
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (cache.is_cached(neighbors[i])) w[i] = gamma;
  }
  return w;
}

namespace {

struct Interner {
  std::unordered_map<NodeId, std::uint32_t> index;
  SampleBatch* batch;

  std::uint32_t intern(NodeId v) {
    auto [it, inserted] = index.emplace(v, static_cast<std::uint32_t>(batch->unique_nodes.size()));
    if (inserted) {
      batch->unique_nodes.push_back(v);
    } else {
      ++batch->num_duplicates_removed;
    }
    return it->second;
  }
};

}  // namespace

SampleBatch sample_khop(const Graph& g, const std::vector<NodeId>& seeds,
                        const SamplerConfig& cfg, const CacheState& cache) {
  if (seeds.empty()) throw ParameterError("sample_khop: seeds must be non-empty");
  for (NodeId s : seeds) {
    if (s >= g.num_nodes) throw ParameterError("sample_khop: seed out of range");
  }

  SampleBatch batch;
  batch.seeds = seeds;
  Interner in{{}, &batch};
  std::vector<NodeId> frontier;
  for (NodeId s : seeds) {
    const std::size_t before = batch.unique_nodes.size();
    in.intern(s);
    if (batch.unique_nodes.size() > before) frontier.push_back(s);
  }
  batch.num_seed_unique = batch.unique_nodes.size();

  batch.layers.resize(cfg.fanouts.size());
  for (std::size_t layer = 0; layer < cfg.fanouts.size(); ++layer) {
    const std::uint32_t fanout = cfg.fanouts[layer];
    if (fanout < 1) throw ParameterError("sample_khop: fanout must be >= 1");
    auto& edges = batch.layers[layer].edges;
    std::vector<NodeId> next_frontier;
    std::unordered_map<NodeId, bool> seen_next;
    for (NodeId dst : frontier) {
      const auto nbrs = g.out_neighbors(dst);
      if (nbrs.empty()) continue;  // trainer handles this with self-fallback
      RngStream node_rng(cfg.rng_seed, hash2(layer, dst));
      std::vector<NodeId> sampled;
      if (cfg.kind == SamplerKind::uniform_baseline) {
        sampled = uniform_reservoir_sample(nbrs, fanout, node_rng);
      } else {
        const std::vector<double> w = assign_weights(nbrs, cache, cfg.bias_rate);
        sampled = weighted_reservoir_sample(nbrs, w, fanout, node_rng);
      }
      const std::uint32_t dst_idx = in.index.at(dst);
      for (NodeId src : sampled) {
        edges.emplace_back(dst_idx, in.intern(src));
        if (!seen_next[src]) {
          seen_next[src] = true;
          next_frontier.push_back(src);
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  return batch;
}

double dedup_ratio(const SampleBatch& b) {
  const double d = static_cast<double>(b.num_duplicates_removed);
  return d / (d + static_cast<double>(b.unique_nodes.size()));
}

void validate_batch(const Graph& g, const SampleBatch& b) {
  for (const auto& layer : b.layers) {
    for (const auto& [dst_idx, src_idx] : layer.edges) {
      if (dst_idx >= b.unique_nodes.size() || src_idx >= b.unique_nodes.size()) {
        throw ParameterError("validate_batch: edge index out of range");
      }
      const NodeId dst = b.unique_nodes[dst_idx];
      const NodeId src = b.unique_nodes[src_idx];
      const auto nbrs = g.out_neighbors(dst);
      if (std::find(nbrs.begin(), nbrs.end(), src) == nbrs.end()) {
        throw ParameterError("validate_batch: sampled edge not in CSR");
      }
    }
  }
  for (std::size_t i = 0; i < b.unique_nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < b.unique_nodes.size(); ++j) {
      if (b.unique_nodes[i] == b.unique_nodes[j]) {
        throw ParameterError("validate_batch: unique_nodes has repeats");
      }
    }
  }
}

}  // namespace a3gnn::sampling
