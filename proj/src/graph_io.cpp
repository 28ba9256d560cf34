#include "a3gnn/graph_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace a3gnn::graph {

namespace {

constexpr char kMagic[4] = {'A', '3', 'G', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

template <typename T>
void read_vec(std::ifstream& in, std::vector<T>& v, std::size_t count) {
  v.resize(count);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(count * sizeof(T)));
}

}  // namespace

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_graph: cannot open " + path);
  out.write(kMagic, 4);
  write_pod(out, g.num_nodes);
  write_pod(out, g.num_edges);
  write_pod(out, g.feat_dim);
  write_vec(out, g.row_offsets);
  write_vec(out, g.col_indices);
  write_vec(out, g.features);
  write_vec(out, g.labels);
  std::vector<std::uint8_t> masks(g.num_nodes);
  for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
    masks[v] = static_cast<std::uint8_t>((g.train_mask[v] ? 1 : 0) |
                                         (g.test_mask[v] ? 2 : 0));
  }
  write_vec(out, masks);
  if (!out) throw IoError("save_graph: write failed for " + path);
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_graph: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("load_graph: bad magic in " + path);
  }
  Graph g;
  g.num_nodes = read_pod<std::uint64_t>(in);
  g.num_edges = read_pod<std::uint64_t>(in);
  g.feat_dim = read_pod<std::uint32_t>(in);
  read_vec(in, g.row_offsets, g.num_nodes + 1);
  read_vec(in, g.col_indices, g.num_edges);
  read_vec(in, g.features, g.num_nodes * g.feat_dim);
  read_vec(in, g.labels, g.num_nodes);
  std::vector<std::uint8_t> masks;
  read_vec(in, masks, g.num_nodes);
  if (!in) throw IoError("load_graph: truncated file " + path);
  g.train_mask.resize(g.num_nodes);
  g.test_mask.resize(g.num_nodes);
  for (std::uint64_t v = 0; v < g.num_nodes; ++v) {
    g.train_mask[v] = masks[v] & 1;
    g.test_mask[v] = (masks[v] >> 1) & 1;
  }
  validate(g);
  return g;
}

Graph load_edge_list(const std::string& path, std::uint32_t feat_dim,
                     bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw IoError("load_edge_list: cannot open " + path);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::uint64_t max_node = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::uint64_t src, dst;
    if (!(ls >> src)) continue;  // blank line
    if (!(ls >> dst)) {
      throw IoError("load_edge_list: malformed line " + std::to_string(line_no) +
                    " in " + path);
    }
    max_node = std::max({max_node, src, dst});
    edges.emplace_back(static_cast<NodeId>(src), static_cast<NodeId>(dst));
    if (symmetrize && src != dst) {
      edges.emplace_back(static_cast<NodeId>(dst), static_cast<NodeId>(src));
    }
  }
  const std::uint64_t n = edges.empty() ? 0 : max_node + 1;
  Graph g = from_edges(n, std::move(edges), feat_dim);
  validate(g);
  return g;
}

}  // namespace a3gnn::graph
