#pragma once

// Static per-device feature cache with out-degree hotness policy. CacheState
// is immutable during an epoch; CacheAccounting uses atomics so concurrent
// samplers and retrievers can share one instance.

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "a3gnn/graph.hpp"
#include "a3gnn/partition.hpp"

namespace a3gnn::sampling {
struct SampleBatch;
}

namespace a3gnn::cache {

using graph::Graph;
using graph::Partition;

enum class CachePolicy { out_degree_hotness };

struct CacheConfig {
  std::uint64_t volume_bytes = 0;  // Theta, per device
  std::uint32_t num_devices = 1;
  CachePolicy policy = CachePolicy::out_degree_hotness;
};

constexpr std::int32_t kCacheMiss = -1;

struct CacheState {
  // node id -> device id, kCacheMiss when uncached
  std::vector<std::int32_t> device_map;
  std::vector<std::vector<NodeId>> cached_per_device;
  std::vector<std::uint64_t> bytes_used;
  std::uint64_t volume_bytes = 0;

  bool is_cached(NodeId v) const {
    return v < device_map.size() && device_map[v] != kCacheMiss;
  }
  std::int32_t device_of(NodeId v) const {
    return v < device_map.size() ? device_map[v] : kCacheMiss;
  }
  std::uint64_t total_cached() const {
    std::uint64_t n = 0;
    for (const auto& d : cached_per_device) n += d.size();
    return n;
  }
};

struct CacheAccounting {
  std::atomic<std::uint64_t> hits{0};
  std::atomic<std::uint64_t> misses{0};
  // Per-device hit splits; a hit on any device's cache counts as a hit.
  std::vector<std::atomic<std::uint64_t>> per_device_hits;

  explicit CacheAccounting(std::uint32_t num_devices = 1)
      : per_device_hits(num_devices) {}
  std::uint64_t total() const { return hits.load() + misses.load(); }
};

struct BatchStats {
  std::uint64_t batch_bytes = 0;  // B: unique-node features + 2 index words/edge
  std::uint64_t num_nodes = 0;
  std::uint64_t num_edges = 0;
};

CacheState build_static_cache(const Graph& g, const CacheConfig& cfg);

// Per-id device (kCacheMiss on miss); increments accounting by |ids|.
std::vector<std::int32_t> lookup(const CacheState& c, const std::vector<NodeId>& ids,
                                 CacheAccounting& acc);

// Gathers features for batch.unique_nodes and computes B.
std::pair<std::vector<float>, BatchStats> retrieve_features(
    const sampling::SampleBatch& b, const CacheState& c, const Graph& g,
    CacheAccounting& acc);

// hits / (hits + misses); throws ParameterError when no lookups were issued.
double hit_rate(const CacheAccounting& acc);

// Restrict a global cache to a partition's nodes, translated to local ids.
CacheState localize(const CacheState& c, const Partition& p);

// CSV "node_id,device_id" dump for inspection.
void dump_manifest(const CacheState& c, const std::string& path);

}  // namespace a3gnn::cache
