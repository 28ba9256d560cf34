#pragma once

// Graph partitioning with 1-hop halos so a 2-layer sampler can stay
// partition-local. Core sets are disjoint and cover V; halo = out-of-core
// 1-hop out-neighbors.

#include <unordered_map>

#include "a3gnn/graph.hpp"

namespace a3gnn::graph {

enum class PartitionMethod { hash, bfs_balanced };

struct Partition {
  std::uint32_t partition_id = 0;
  std::vector<NodeId> core_nodes;  // sorted global ids
  std::vector<NodeId> halo_nodes;  // sorted global ids, disjoint from core
  Graph local_graph;               // induced on core + halo
  std::unordered_map<NodeId, NodeId> global_to_local;
  std::vector<NodeId> local_to_global;

  bool is_core_local(NodeId local) const { return local < core_nodes.size(); }
};

struct PartitionStats {
  // eta = |core + halo| / |V|
  double eta = 0.0;
};

struct PartitionSet {
  std::vector<Partition> parts;
  std::vector<PartitionStats> stats;
};

PartitionSet partition_graph(const Graph& g, std::uint32_t u, PartitionMethod method);

// Translate global ids into p's local id space. Throws LookupError for ids
// outside core + halo (a sampler escaping its partition).
std::vector<NodeId> reindex(const std::vector<NodeId>& global_ids, const Partition& p);

// Inverse translation.
std::vector<NodeId> reindex_to_global(const std::vector<NodeId>& local_ids,
                                      const Partition& p);

}  // namespace a3gnn::graph
