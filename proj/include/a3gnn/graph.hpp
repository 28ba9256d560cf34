#pragma once

// CSR graph with a dense per-node feature store. Immutable after
// construction; safe for unsynchronized shared reads.

#include <cstdint>
#include <span>
#include <vector>

#include "a3gnn/common.hpp"

namespace a3gnn::graph {

struct Graph {
  std::uint64_t num_nodes = 0;
  std::uint64_t num_edges = 0;  // directed edge entries
  std::uint32_t feat_dim = 0;
  std::vector<std::uint64_t> row_offsets;  // len num_nodes + 1
  std::vector<NodeId> col_indices;         // len num_edges
  std::vector<float> features;             // num_nodes x feat_dim, row-major
  std::vector<std::uint32_t> labels;       // class id per node
  std::vector<std::uint8_t> train_mask;
  std::vector<std::uint8_t> test_mask;

  std::span<const NodeId> out_neighbors(NodeId v) const {
    return {col_indices.data() + row_offsets[v],
            col_indices.data() + row_offsets[v + 1]};
  }
  std::uint64_t out_degree(NodeId v) const {
    return row_offsets[v + 1] - row_offsets[v];
  }
  const float* feature_row(NodeId v) const {
    return features.data() + static_cast<std::size_t>(v) * feat_dim;
  }
  std::uint32_t num_classes() const;
};

struct GraphStats {
  double density = 0.0;  // num_edges / (num_nodes * (num_nodes - 1))
  double degree_mean = 0.0;
  std::uint64_t degree_max = 0;
  std::uint64_t num_nodes = 0;
  std::uint64_t num_edges = 0;
};

// Throws ParameterError if any CSR invariant is violated.
void validate(const Graph& g);

GraphStats graph_stats(const Graph& g);

// Builds CSR from an edge list; sorts neighbors per source node.
Graph from_edges(std::uint64_t num_nodes,
                 std::vector<std::pair<NodeId, NodeId>> edges,
                 std::uint32_t feat_dim);

}  // namespace a3gnn::graph
