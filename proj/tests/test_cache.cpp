#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "a3gnn/cache.hpp"
#include "a3gnn/generators.hpp"
#include "a3gnn/sampler.hpp"

using namespace a3gnn;
using namespace a3gnn::cache;

TEST_SUITE("cache") {

TEST_CASE("zero volume yields an empty device map") {
  const auto g = graph::generate_power_law(100, 2, 2.5, 16, 1);
  const CacheState c = build_static_cache(g, {0, 1, CachePolicy::out_degree_hotness});
  CHECK(c.total_cached() == 0);
  for (auto d : c.device_map) CHECK(d == kCacheMiss);
}

TEST_CASE("volume covering all features caches every node") {
  const auto g = graph::generate_power_law(100, 2, 2.5, 16, 1);
  const std::uint64_t all = g.num_nodes * g.feat_dim * 4;
  const CacheState c = build_static_cache(g, {all, 1, CachePolicy::out_degree_hotness});
  CHECK(c.total_cached() == g.num_nodes);
}

TEST_CASE("hotness cache holds exactly the top by out-degree, ties by id") {
  const auto g = graph::generate_power_law(1000, 2, 2.5, 16, 3);
  const CacheState c = build_static_cache(g, {6400, 1, CachePolicy::out_degree_hotness});
  REQUIRE(c.total_cached() == 100);

  std::vector<NodeId> order(g.num_nodes);
  for (NodeId v = 0; v < g.num_nodes; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return g.out_degree(a) != g.out_degree(b) ? g.out_degree(a) > g.out_degree(b) : a < b;
  });
  for (std::size_t i = 0; i < 100; ++i) CHECK(c.is_cached(order[i]));
  // Hotness dominance: no uncached node out-ranks a cached one.
  std::uint64_t min_cached_degree = UINT64_MAX;
  for (NodeId v : c.cached_per_device[0]) {
    min_cached_degree = std::min(min_cached_degree, g.out_degree(v));
  }
  for (NodeId v = 0; v < g.num_nodes; ++v) {
    if (!c.is_cached(v)) CHECK(g.out_degree(v) <= min_cached_degree);
  }
}

TEST_CASE("round-robin splits hot nodes disjointly across devices") {
  const auto g = graph::generate_power_law(500, 2, 2.5, 16, 5);
  const CacheConfig cfg{6400, 4, CachePolicy::out_degree_hotness};
  const CacheState c = build_static_cache(g, cfg);
  CHECK(c.total_cached() == 400);
  for (std::uint32_t d = 0; d < 4; ++d) {
    CHECK(c.cached_per_device[d].size() == 100);
    CHECK(c.bytes_used[d] <= cfg.volume_bytes);
  }
  std::vector<std::uint32_t> seen(g.num_nodes, 0);
  for (const auto& dev : c.cached_per_device) {
    for (NodeId v : dev) ++seen[v];
  }
  for (auto s : seen) CHECK(s <= 1);  // a node maps to at most one device
}

TEST_CASE("lookup accounting is exact") {
  const auto g = graph::generate_power_law(100, 2, 2.5, 8, 7);
  const CacheState empty = build_static_cache(g, {0, 1, CachePolicy::out_degree_hotness});
  CacheAccounting acc(1);
  const auto res = lookup(empty, {1, 2, 3}, acc);
  CHECK(res == std::vector<std::int32_t>{kCacheMiss, kCacheMiss, kCacheMiss});
  CHECK(acc.misses.load() == 3);
  CHECK(acc.hits.load() == 0);
  CHECK_THROWS_AS(hit_rate(CacheAccounting{1}), ParameterError);

  // Constructed 50/50 fixture.
  CacheState half;
  half.device_map.assign(10, kCacheMiss);
  half.cached_per_device.resize(1);
  half.bytes_used.assign(1, 0);
  for (NodeId v = 0; v < 5; ++v) {
    half.device_map[v] = 0;
    half.cached_per_device[0].push_back(v);
  }
  CacheAccounting acc2(1);
  std::vector<NodeId> ids;
  for (NodeId v = 0; v < 10; ++v) ids.push_back(v);
  lookup(half, ids, acc2);
  CHECK(acc2.hits.load() == 5);
  CHECK(acc2.misses.load() == 5);
  CHECK(hit_rate(acc2) == doctest::Approx(0.5));

  CacheAccounting acc3(1);
  acc3.hits = 30;
  acc3.misses = 70;
  CHECK(hit_rate(acc3) == doctest::Approx(0.30));
}

TEST_CASE("retrieve_features gathers exact rows and computes B") {
  const auto g = graph::generate_sbm(50, 2, 0.3, 0.05, 16, 9);
  const CacheState c = build_static_cache(g, {0, 1, CachePolicy::out_degree_hotness});
  CacheAccounting acc(1);

  // Isolated-seed arithmetic: B = feat bytes only.
  sampling::SampleBatch lone;
  lone.seeds = {3};
  lone.unique_nodes = {3};
  lone.num_seed_unique = 1;
  const auto [feats1, stats1] = retrieve_features(lone, c, g, acc);
  CHECK(stats1.batch_bytes == 64);
  CHECK(stats1.num_edges == 0);

  // 10 nodes, 20 edges, feat 16 -> 10*64 + 20*8 = 800.
  sampling::SampleBatch b;
  for (NodeId v = 0; v < 10; ++v) b.unique_nodes.push_back(v);
  b.seeds = {0};
  b.num_seed_unique = 1;
  b.layers.resize(1);
  for (std::uint32_t e = 0; e < 20; ++e) b.layers[0].edges.emplace_back(e % 10, (e + 1) % 10);
  const auto [feats, stats] = retrieve_features(b, c, g, acc);
  CHECK(stats.batch_bytes == 800);

  // Gather oracle: rows equal the graph's feature rows exactly.
  for (std::size_t i = 0; i < b.unique_nodes.size(); ++i) {
    for (std::uint32_t d = 0; d < g.feat_dim; ++d) {
      CHECK(feats[i * g.feat_dim + d] == g.feature_row(b.unique_nodes[i])[d]);
    }
  }
  CHECK(acc.total() == 11);
}

TEST_CASE("localize translates the device map into partition ids") {
  const auto g = graph::generate_power_law(200, 2, 2.5, 8, 11);
  const CacheState global = build_static_cache(g, {1600, 2, CachePolicy::out_degree_hotness});
  const auto ps = graph::partition_graph(g, 2, graph::PartitionMethod::hash);
  const CacheState local = localize(global, ps.parts[0]);
  REQUIRE(local.device_map.size() == ps.parts[0].local_to_global.size());
  for (std::size_t lv = 0; lv < local.device_map.size(); ++lv) {
    CHECK(local.device_map[lv] == global.device_of(ps.parts[0].local_to_global[lv]));
  }
}

TEST_CASE("manifest dump lists cached nodes as node_id,device_id") {
  const auto g = graph::generate_power_law(50, 2, 2.5, 8, 13);
  const CacheState c = build_static_cache(g, {320, 2, CachePolicy::out_degree_hotness});
  const auto path = std::filesystem::temp_directory_path() / "a3gnn_manifest.csv";
  dump_manifest(c, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "node_id,device_id");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines == c.total_cached());
  std::filesystem::remove(path);
}

}  // TEST_SUITE
