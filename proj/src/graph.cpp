#include "a3gnn/graph.hpp"

#include <algorithm>

namespace a3gnn::graph {

std::uint32_t Graph::num_classes() const {
  std::uint32_t c = 0;
  for (std::uint32_t l : labels) c = std::max(c, l + 1);
  return c;
}

void validate(const Graph& g) {
  if (g.feat_dim < 1) throw ParameterError("graph: feat_dim must be >= 1");
  if (g.row_offsets.size() != g.num_nodes + 1) {
    throw ParameterError("graph: row_offsets length mismatch");
  }
  if (g.row_offsets.front() != 0) throw ParameterError("graph: row_offsets[0] != 0");
  if (g.row_offsets.back() != g.num_edges) {
    throw ParameterError("graph: row_offsets[last] != num_edges");
  }
  for (std::size_t i = 0; i + 1 < g.row_offsets.size(); ++i) {
    if (g.row_offsets[i] > g.row_offsets[i + 1]) {
      throw ParameterError("graph: row_offsets not non-decreasing");
    }
  }
  if (g.col_indices.size() != g.num_edges) {
    throw ParameterError("graph: col_indices length mismatch");
  }
  for (NodeId c : g.col_indices) {
    if (c >= g.num_nodes) throw ParameterError("graph: col_index out of range");
  }
  if (g.features.size() != g.num_nodes * g.feat_dim) {
    throw ParameterError("graph: feature matrix size mismatch");
  }
  if (g.labels.size() != g.num_nodes || g.train_mask.size() != g.num_nodes ||
      g.test_mask.size() != g.num_nodes) {
    throw ParameterError("graph: per-node array size mismatch");
  }
}

GraphStats graph_stats(const Graph& g) {
  GraphStats s;
  s.num_nodes = g.num_nodes;
  s.num_edges = g.num_edges;
  if (g.num_nodes > 1) {
    s.density = static_cast<double>(g.num_edges) /
                (static_cast<double>(g.num_nodes) * static_cast<double>(g.num_nodes - 1));
  }
  if (g.num_nodes > 0) {
    s.degree_mean = static_cast<double>(g.num_edges) / static_cast<double>(g.num_nodes);
    for (NodeId v = 0; v < g.num_nodes; ++v) {
      s.degree_max = std::max(s.degree_max, g.out_degree(v));
    }
  }
  return s;
}

Graph from_edges(std::uint64_t num_nodes,
                 std::vector<std::pair<NodeId, NodeId>> edges,
                 std::uint32_t feat_dim) {
  Graph g;
  g.num_nodes = num_nodes;
  g.num_edges = edges.size();
  g.feat_dim = feat_dim;
  std::sort(edges.begin(), edges.end());
  g.row_offsets.assign(num_nodes + 1, 0);
  for (const auto& [src, dst] : edges) {
    if (src >= num_nodes || dst >= num_nodes) {
      throw ParameterError("from_edges: endpoint out of range");
    }
    ++g.row_offsets[src + 1];
  }
  for (std::size_t i = 1; i < g.row_offsets.size(); ++i) {
    g.row_offsets[i] += g.row_offsets[i - 1];
  }
  g.col_indices.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) g.col_indices[i] = edges[i].second;
  g.features.assign(num_nodes * feat_dim, 0.0f);
  g.labels.assign(num_nodes, 0);
  g.train_mask.assign(num_nodes, 0);
  g.test_mask.assign(num_nodes, 0);
  return g;
}

}  // namespace a3gnn::graph
