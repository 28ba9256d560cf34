#include "a3gnn/generators.hpp"

#include <algorithm>
#include <cmath>

#include "a3gnn/rng.hpp"

namespace a3gnn::graph {

namespace {

void fill_features_and_masks(Graph& g, const std::vector<std::uint32_t>& labels,
                             RngStream& rng) {
  const std::uint32_t f = g.feat_dim;
  g.labels = labels;
  g.features.resize(g.num_nodes * f);
  RngStream noise = rng.substream(0xfea7);
  for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
    float* row = g.features.data() + v * f;
    for (std::uint32_t d = 0; d < f; ++d) {
      row[d] = static_cast<float>(noise.next_gaussian());
    }
    row[labels[v] % f] += 1.0f;
  }
  // 60/40 train/test split, shuffled per seed.
  std::vector<NodeId> order(g.num_nodes);
  for (std::uint64_t v = 0; v < g.num_nodes; ++v) order[v] = static_cast<NodeId>(v);
  RngStream split = rng.substream(0x5411);
  split.shuffle(order);
  g.train_mask.assign(g.num_nodes, 0);
  g.test_mask.assign(g.num_nodes, 0);
  const std::uint64_t n_train = (g.num_nodes * 6) / 10;
  for (std::uint64_t i = 0; i < g.num_nodes; ++i) {
    if (i < n_train) {
      g.train_mask[order[i]] = 1;
    } else {
      g.test_mask[order[i]] = 1;
    }
  }
}

}  // namespace

Graph generate_sbm(std::uint64_t n_nodes, std::uint32_t n_blocks, double p_in,
                   double p_out, std::uint32_t feat_dim, std::uint64_t seed) {
  if (n_blocks == 0 || n_blocks > n_nodes) {
    throw ParameterError("generate_sbm: need 1 <= n_blocks <= n_nodes");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw ParameterError("generate_sbm: need 0 <= p_out < p_in <= 1");
  }
  if (feat_dim < 1) throw ParameterError("generate_sbm: feat_dim must be >= 1");

  const std::uint64_t per_block = (n_nodes + n_blocks - 1) / n_blocks;
  std::vector<std::uint32_t> block(n_nodes);
  for (std::uint64_t v = 0; v < n_nodes; ++v) {
    block[v] = static_cast<std::uint32_t>(std::min<std::uint64_t>(v / per_block, n_blocks - 1));
  }

  RngStream rng(seed, 0x5b31);
  RngStream edge_rng = rng.substream(0xed6e);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::uint64_t i = 0; i < n_nodes; ++i) {
    for (std::uint64_t j = 0; j < n_nodes; ++j) {
      if (i == j) continue;
      const double p = block[i] == block[j] ? p_in : p_out;
      if (edge_rng.next_bernoulli(p)) {
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      }
    }
  }

  Graph g = from_edges(n_nodes, std::move(edges), feat_dim);
  fill_features_and_masks(g, block, rng);
  validate(g);
  return g;
}

Graph generate_power_law(std::uint64_t n_nodes, std::uint32_t min_degree,
                         double exponent, std::uint32_t feat_dim,
                         std::uint64_t seed) {
  if (exponent <= 1.0) throw ParameterError("generate_power_law: exponent must be > 1");
  if (min_degree < 1) throw ParameterError("generate_power_law: min_degree must be >= 1");
  if (feat_dim < 1) throw ParameterError("generate_power_law: feat_dim must be >= 1");
  if (n_nodes < 2) throw ParameterError("generate_power_law: need at least 2 nodes");

  RngStream rng(seed, 0x97a3);
  RngStream deg_rng = rng.substream(0xde6);

  // Truncated Pareto out-degrees: P(D >= x) = (x / min_degree)^-(exponent-1).
  const std::uint64_t cap = n_nodes - 1;
  std::vector<std::uint64_t> degree(n_nodes);
  for (std::uint64_t v = 0; v < n_nodes; ++v) {
    double u = deg_rng.next_unit();
    if (u <= 0.0) u = 0x1.0p-53;
    double d = std::floor(min_degree * std::pow(u, -1.0 / (exponent - 1.0)));
    degree[v] = std::min<std::uint64_t>(cap, std::max<std::uint64_t>(min_degree, static_cast<std::uint64_t>(d)));
  }

  // Targets drawn proportional to (target out-degree + 1) so hub hotness shows
  // up in neighbor lists, not just in adjacency size.
  std::vector<double> cumulative(n_nodes);
  double total = 0.0;
  for (std::uint64_t v = 0; v < n_nodes; ++v) {
    total += static_cast<double>(degree[v]) + 1.0;
    cumulative[v] = total;
  }

  RngStream pick_rng = rng.substream(0x91c4);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::uint8_t> used(n_nodes, 0);
  std::vector<NodeId> chosen;
  for (std::uint64_t src = 0; src < n_nodes; ++src) {
    chosen.clear();
    const std::uint64_t want = degree[src];
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 30 * want + 64;
    while (chosen.size() < want && attempts < max_attempts) {
      ++attempts;
      const double r = pick_rng.next_unit() * total;
      const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
      const NodeId t = static_cast<NodeId>(it - cumulative.begin());
      if (t == src || used[t]) continue;
      used[t] = 1;
      chosen.push_back(t);
    }
    if (chosen.size() < want) {
      // Dense saturation: fall back to scanning remaining candidates in order.
      for (std::uint64_t t = 0; t < n_nodes && chosen.size() < want; ++t) {
        if (t == src || used[t]) continue;
        used[t] = 1;
        chosen.push_back(static_cast<NodeId>(t));
      }
    }
    for (NodeId t : chosen) {
      edges.emplace_back(static_cast<NodeId>(src), t);
      used[t] = 0;
    }
  }

  Graph g = from_edges(n_nodes, std::move(edges), feat_dim);
  std::vector<std::uint32_t> labels(n_nodes);
  for (std::uint64_t v = 0; v < n_nodes; ++v) {
    labels[v] = static_cast<std::uint32_t>(mix64(v ^ 0xabcd) % 4);
  }
  fill_features_and_masks(g, labels, rng);
  validate(g);
  return g;
}

}  // namespace a3gnn::graph
