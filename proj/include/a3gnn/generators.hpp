#pragma once

// Synthetic graph generators: stochastic block model for learnable labels,
// truncated power law for skewed hotness. Both are deterministic per seed.

#include "a3gnn/graph.hpp"

namespace a3gnn::graph {

// Node label = block id, features = one-hot(block) + unit Gaussian noise.
// Blocks are contiguous id ranges. Directed edges drawn independently.
Graph generate_sbm(std::uint64_t n_nodes, std::uint32_t n_blocks, double p_in,
                   double p_out, std::uint32_t feat_dim, std::uint64_t seed);

// Out-degree ~ truncated Pareto(min_degree, exponent), capped at n-1.
// Edge targets drawn proportional to target out-degree (hubs attract edges),
// distinct per source, no self loops.
Graph generate_power_law(std::uint64_t n_nodes, std::uint32_t min_degree,
                         double exponent, std::uint32_t feat_dim,
                         std::uint64_t seed);

}  // namespace a3gnn::graph
