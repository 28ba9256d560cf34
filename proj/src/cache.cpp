#include "a3gnn/cache.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "a3gnn/kernels.hpp"
#include "a3gnn/sampler.hpp"

namespace a3gnn::cache {

CacheState build_static_cache(const Graph& g, const CacheConfig& cfg) {
  if (cfg.num_devices < 1) throw ParameterError("build_static_cache: num_devices >= 1");
  CacheState state;
  state.volume_bytes = cfg.volume_bytes;
  state.device_map.assign(g.num_nodes, kCacheMiss);
  state.cached_per_device.resize(cfg.num_devices);
  state.bytes_used.assign(cfg.num_devices, 0);

  const std::uint64_t node_cost = static_cast<std::uint64_t>(g.feat_dim) * 4;
  if (cfg.volume_bytes < node_cost) return state;  // nothing fits

  // Hotness order: descending out-degree, ties broken by lower node id.
  std::vector<NodeId> order(g.num_nodes);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    const std::uint64_t da = g.out_degree(a), db = g.out_degree(b);
    return da != db ? da > db : a < b;
  });

  std::uint32_t device = 0;
  std::uint32_t full_devices = 0;
  for (NodeId v : order) {
    if (full_devices == cfg.num_devices) break;
    // Round-robin, skipping devices whose volume is exhausted.
    while (state.bytes_used[device] + node_cost > cfg.volume_bytes) {
      device = (device + 1) % cfg.num_devices;
    }
    state.device_map[v] = static_cast<std::int32_t>(device);
    state.cached_per_device[device].push_back(v);
    state.bytes_used[device] += node_cost;
    if (state.bytes_used[device] + node_cost > cfg.volume_bytes) ++full_devices;
    device = (device + 1) % cfg.num_devices;
  }
  return state;
}

std::vector<std::int32_t> lookup(const CacheState& c, const std::vector<NodeId>& ids,
                                 CacheAccounting& acc) {
  std::vector<std::int32_t> out;
  out.reserve(ids.size());
  std::uint64_t hits = 0, misses = 0;
  for (NodeId v : ids) {
    const std::int32_t d = c.device_of(v);
    out.push_back(d);
    if (d == kCacheMiss) {
      ++misses;
    } else {
      ++hits;
      if (static_cast<std::size_t>(d) < acc.per_device_hits.size()) {
        acc.per_device_hits[d].fetch_add(1, std::memory_order_relaxed);
      }
    }
  }
  acc.hits.fetch_add(hits, std::memory_order_relaxed);
  acc.misses.fetch_add(misses, std::memory_order_relaxed);
  return out;
}

std::pair<std::vector<float>, BatchStats> retrieve_features(
    const sampling::SampleBatch& b, const CacheState& c, const Graph& g,
    CacheAccounting& acc) {
  for (NodeId v : b.unique_nodes) {
    if (v >= g.num_nodes) throw ParameterError("retrieve_features: node out of range");
  }
  lookup(c, b.unique_nodes, acc);

  std::vector<float> feats(b.unique_nodes.size() * g.feat_dim);
  kernels::gather_rows(g.features.data(), g.feat_dim, b.unique_nodes.data(),
                       b.unique_nodes.size(), feats.data());

  BatchStats stats;
  stats.num_nodes = b.unique_nodes.size();
  stats.num_edges = b.total_edges();
  stats.batch_bytes = stats.num_nodes * g.feat_dim * 4 + stats.num_edges * 2 * 4;
  return {std::move(feats), stats};
}

double hit_rate(const CacheAccounting& acc) {
  const std::uint64_t total = acc.total();
  if (total == 0) throw ParameterError("hit_rate: no lookups issued");
  return static_cast<double>(acc.hits.load()) / static_cast<double>(total);
}

CacheState localize(const CacheState& c, const Partition& p) {
  CacheState local;
  local.volume_bytes = c.volume_bytes;
  local.device_map.assign(p.local_to_global.size(), kCacheMiss);
  local.cached_per_device.resize(c.cached_per_device.size());
  local.bytes_used.assign(c.bytes_used.size(), 0);
  for (std::size_t lv = 0; lv < p.local_to_global.size(); ++lv) {
    const std::int32_t d = c.device_of(p.local_to_global[lv]);
    if (d != kCacheMiss) {
      local.device_map[lv] = d;
      local.cached_per_device[d].push_back(static_cast<NodeId>(lv));
    }
  }
  return local;
}

void dump_manifest(const CacheState& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dump_manifest: cannot open " + path);
  out << "node_id,device_id\n";
  for (std::size_t v = 0; v < c.device_map.size(); ++v) {
    if (c.device_map[v] != kCacheMiss) {
      out << v << "," << c.device_map[v] << "\n";
    }
  }
}

}  // namespace a3gnn::cache
