#include "a3gnn/partition.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace a3gnn::graph {

namespace {

std::vector<std::uint32_t> assign_cores(const Graph& g, std::uint32_t u,
                                        PartitionMethod method) {
  const std::uint64_t n = g.num_nodes;
  std::vector<std::uint32_t> owner(n, 0);
  if (method == PartitionMethod::hash) {
    for (std::uint64_t v = 0; v < n; ++v) owner[v] = static_cast<std::uint32_t>(v % u);
    return owner;
  }
  // bfs_balanced: grow each partition from the lowest unassigned id until it
  // reaches its share, then move on. Leftovers go to the smallest partition.
  const std::uint64_t target = (n + u - 1) / u;
  std::vector<std::uint8_t> assigned(n, 0);
  std::uint64_t next_unassigned = 0;
  for (std::uint32_t p = 0; p < u; ++p) {
    std::uint64_t size = 0;
    std::deque<NodeId> frontier;
    while (size < target) {
      if (frontier.empty()) {
        while (next_unassigned < n && assigned[next_unassigned]) ++next_unassigned;
        if (next_unassigned >= n) break;
        frontier.push_back(static_cast<NodeId>(next_unassigned));
        assigned[next_unassigned] = 1;
        owner[next_unassigned] = p;
        ++size;
        if (size >= target) break;
      }
      const NodeId v = frontier.front();
      frontier.pop_front();
      for (NodeId w : g.out_neighbors(v)) {
        if (size >= target) break;
        if (!assigned[w]) {
          assigned[w] = 1;
          owner[w] = p;
          frontier.push_back(w);
          ++size;
        }
      }
    }
  }
  for (std::uint64_t v = 0; v < n; ++v) {
    if (!assigned[v]) owner[v] = u - 1;
  }
  return owner;
}

Graph induce_subgraph(const Graph& g, const std::vector<NodeId>& local_to_global,
                      const std::unordered_map<NodeId, NodeId>& global_to_local,
                      std::size_t num_core) {
  Graph s;
  s.num_nodes = local_to_global.size();
  s.feat_dim = g.feat_dim;
  s.row_offsets.assign(s.num_nodes + 1, 0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t lv = 0; lv < local_to_global.size(); ++lv) {
    const NodeId gv = local_to_global[lv];
    for (NodeId gw : g.out_neighbors(gv)) {
      auto it = global_to_local.find(gw);
      if (it != global_to_local.end()) {
        edges.emplace_back(static_cast<NodeId>(lv), it->second);
      }
    }
  }
  s = from_edges(s.num_nodes, std::move(edges), g.feat_dim);
  s.features.resize(s.num_nodes * g.feat_dim);
  for (std::size_t lv = 0; lv < local_to_global.size(); ++lv) {
    const NodeId gv = local_to_global[lv];
    std::copy_n(g.feature_row(gv), g.feat_dim, s.features.data() + lv * g.feat_dim);
    s.labels[lv] = g.labels[gv];
    // Halo nodes are owned elsewhere; they carry features only.
    s.train_mask[lv] = lv < num_core ? g.train_mask[gv] : 0;
    s.test_mask[lv] = lv < num_core ? g.test_mask[gv] : 0;
  }
  return s;
}

}  // namespace

PartitionSet partition_graph(const Graph& g, std::uint32_t u, PartitionMethod method) {
  if (u < 1 || u > g.num_nodes) {
    throw ParameterError("partition_graph: need 1 <= u <= num_nodes");
  }
  const std::vector<std::uint32_t> owner = assign_cores(g, u, method);

  PartitionSet out;
  out.parts.resize(u);
  out.stats.resize(u);
  for (std::uint32_t p = 0; p < u; ++p) {
    Partition& part = out.parts[p];
    part.partition_id = p;
    for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
      if (owner[v] == p) part.core_nodes.push_back(static_cast<NodeId>(v));
    }
    std::vector<std::uint8_t> in_core(g.num_nodes, 0);
    for (NodeId v : part.core_nodes) in_core[v] = 1;
    std::vector<std::uint8_t> in_halo(g.num_nodes, 0);
    for (NodeId v : part.core_nodes) {
      for (NodeId w : g.out_neighbors(v)) {
        if (!in_core[w]) in_halo[w] = 1;
      }
    }
    for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
      if (in_halo[v]) part.halo_nodes.push_back(static_cast<NodeId>(v));
    }
    part.local_to_global = part.core_nodes;
    part.local_to_global.insert(part.local_to_global.end(), part.halo_nodes.begin(),
                                part.halo_nodes.end());
    part.global_to_local.reserve(part.local_to_global.size());
    for (std::size_t i = 0; i < part.local_to_global.size(); ++i) {
      part.global_to_local.emplace(part.local_to_global[i], static_cast<NodeId>(i));
    }
    part.local_graph =
        induce_subgraph(g, part.local_to_global, part.global_to_local, part.core_nodes.size());
    validate(part.local_graph);
    out.stats[p].eta = static_cast<double>(part.local_to_global.size()) /
                       static_cast<double>(g.num_nodes);
  }
  return out;
}

std::vector<NodeId> reindex(const std::vector<NodeId>& global_ids, const Partition& p) {
  std::vector<NodeId> out;
  out.reserve(global_ids.size());
  for (NodeId g : global_ids) {
    auto it = p.global_to_local.find(g);
    if (it == p.global_to_local.end()) {
      throw LookupError("reindex: id " + std::to_string(g) + " not in partition " +
                        std::to_string(p.partition_id));
    }
    out.push_back(it->second);
  }
  return out;
}

std::vector<NodeId> reindex_to_global(const std::vector<NodeId>& local_ids,
                                      const Partition& p) {
  std::vector<NodeId> out;
  out.reserve(local_ids.size());
  for (NodeId l : local_ids) {
    if (l >= p.local_to_global.size()) {
      throw LookupError("reindex_to_global: local id " + std::to_string(l) +
                        " out of range");
    }
    out.push_back(p.local_to_global[l]);
  }
  return out;
}

}  // namespace a3gnn::graph
