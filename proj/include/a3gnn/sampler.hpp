#pragma once

// Locality-aware multi-hop neighbor sampling. The core primitive is weighted
// reservoir sampling with keys k_j = U^(1/w_j); cached vertices get weight
// gamma, everything else weight 1.

#include <span>

#include "a3gnn/cache.hpp"
#include "a3gnn/graph.hpp"
#include "a3gnn/rng.hpp"

namespace a3gnn::sampling {

using cache::CacheState;
using graph::Graph;

enum class SamplerKind {
  weighted_reservoir,  // Algo-style keyed reservoir, bias-aware
  uniform_baseline,    // classic unweighted reservoir, for equivalence checks
};

struct SamplerConfig {
  std::vector<std::uint32_t> fanouts;  // per layer, outermost first
  double bias_rate = 1.0;              // gamma >= 1; 1 = uniform
  std::uint64_t rng_seed = 0;
  SamplerKind kind = SamplerKind::weighted_reservoir;
};

struct SampleBatch {
  std::vector<NodeId> seeds;         // original batch node ids
  std::vector<NodeId> unique_nodes;  // deduplicated; unique seeds first
  std::size_t num_seed_unique = 0;
  struct Layer {
    // (dst, src) pairs as indices into unique_nodes
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  };
  std::vector<Layer> layers;
  std::uint64_t num_duplicates_removed = 0;

  std::uint64_t total_edges() const {
    std::uint64_t n = 0;
    for (const auto& l : layers) n += l.edges.size();
    return n;
  }
};

// Algo: one key evaluation per neighbor, O(m) working memory; an incoming
// element replaces the current minimum only when its key is strictly greater.
std::vector<NodeId> weighted_reservoir_sample(std::span<const NodeId> neighbors,
                                              std::span<const double> weights,
                                              std::uint32_t m, RngStream& rng);

// Classic reservoir (Algorithm R) baseline; uniform without replacement.
std::vector<NodeId> uniform_reservoir_sample(std::span<const NodeId> neighbors,
                                             std::uint32_t m, RngStream& rng);

// gamma for cached neighbors, 1 otherwise.
std::vector<double> assign_weights(std::span<const NodeId> neighbors,
                                   const CacheState& cache, double gamma);

SampleBatch sample_khop(const Graph& g, const std::vector<NodeId>& seeds,
                        const SamplerConfig& cfg, const CacheState& cache);

// num_duplicates_removed / (num_duplicates_removed + |unique_nodes|)
double dedup_ratio(const SampleBatch& b);

// Checks every batch edge against the CSR structure; throws on violation.
void validate_batch(const Graph& g, const SampleBatch& b);

}  // namespace a3gnn::sampling
