#pragma once

// Graph binary format:
//   header  {magic "A3G1", num_nodes u64-LE, num_edges u64-LE, feat_dim u32-LE}
//   row_offsets u64-LE x (n+1), col_indices u32-LE x m,
//   features f32-LE row-major, labels u32-LE x n,
//   masks u8 x n (bit0 = train, bit1 = test).

#include <string>

#include "a3gnn/graph.hpp"

namespace a3gnn::graph {

void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

// One "src dst" pair per line; '#' starts a comment. When symmetrize is set
// the reverse edge of every pair is added too (undirected input).
Graph load_edge_list(const std::string& path, std::uint32_t feat_dim,
                     bool symmetrize);

}  // namespace a3gnn::graph
