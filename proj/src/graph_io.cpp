#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qrcert/graph.hpp"

namespace qr {

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return line;
  }
  return {};
}

struct RawEdges {
  int n = 0;
  std::size_t declared = 0;
  int k = 0;
  std::vector<std::vector<long long>> edges;
};

RawEdges read_raw(std::istream& in, bool hyper) {
  RawEdges raw;
  const std::string header = next_content_line(in);
  if (header.empty()) throw std::runtime_error("edge list: missing header");
  std::istringstream hs(header);
  long long n = -1, m = -1, k = 2;
  hs >> n >> m;
  if (hyper) hs >> k;
  if (!hs || n < 0 || m < 0 || k < 1) throw std::runtime_error("edge list: malformed header '" + header + "'");
  raw.n = static_cast<int>(n);
  raw.declared = static_cast<std::size_t>(m);
  raw.k = static_cast<int>(k);
  raw.edges.reserve(raw.declared);
  for (std::size_t i = 0; i < raw.declared; ++i) {
    const std::string line = next_content_line(in);
    if (line.empty()) throw std::runtime_error("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    std::istringstream ls(line);
    std::vector<long long> e(static_cast<std::size_t>(k));
    for (auto& v : e) ls >> v;
    if (!ls) throw std::runtime_error("edge list: malformed edge line '" + line + "'");
    raw.edges.push_back(std::move(e));
  }
  return raw;
}

// Maps labels onto [0, n). Labels already in range are kept as-is;
// otherwise the distinct labels are relabeled in sorted order.
std::optional<std::vector<long long>> relabel(RawEdges& raw) {
  bool in_range = true;
  for (const auto& e : raw.edges)
    for (long long v : e)
      if (v < 0 || v >= raw.n) in_range = false;
  if (in_range) return std::nullopt;

  std::map<long long, int> index;
  for (const auto& e : raw.edges)
    for (long long v : e) index.emplace(v, 0);
  if (index.size() > static_cast<std::size_t>(raw.n))
    throw std::runtime_error("edge list: " + std::to_string(index.size()) + " distinct labels exceed n = " + std::to_string(raw.n));
  std::vector<long long> original;
  int next = 0;
  for (auto& [label, id] : index) {
    id = next++;
    original.push_back(label);
  }
  for (auto& e : raw.edges)
    for (auto& v : e) v = index[v];
  return original;
}

}  // namespace

void write_edge_list(std::ostream& out, const Graph& g) {
  const auto edges = g.edges();
  out << g.n() << ' ' << edges.size() << '\n';
  for (const auto& [u, v] : edges) out << u << ' ' << v << '\n';
}

void write_edge_list(std::ostream& out, const UniformHypergraph& h) {
  out << h.n() << ' ' << h.size() << ' ' << h.k() << '\n';
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto e = h.edge(i);
    for (std::size_t j = 0; j < e.size(); ++j) out << (j ? " " : "") << e[j];
    out << '\n';
  }
}

LoadedGraph read_graph(std::istream& in) {
  RawEdges raw = read_raw(in, false);
  LoadedGraph result;
  result.original_label = relabel(raw);
  GraphBuilder b(raw.n);
  for (const auto& e : raw.edges) b.add_edge(static_cast<Vertex>(e[0]), static_cast<Vertex>(e[1]));
  result.graph = std::move(b).build();
  return result;
}

LoadedHypergraph read_hypergraph(std::istream& in) {
  RawEdges raw = read_raw(in, true);
  LoadedHypergraph result;
  result.original_label = relabel(raw);
  std::vector<std::vector<Vertex>> edges;
  edges.reserve(raw.edges.size());
  for (const auto& e : raw.edges) edges.emplace_back(e.begin(), e.end());
  result.hypergraph = UniformHypergraph(raw.n, raw.k, std::move(edges));
  return result;
}

LoadedGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path);
  return read_graph(in);
}

LoadedHypergraph load_hypergraph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hypergraph file " + path);
  return read_hypergraph(in);
}

void save_edge_list_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, g);
}

void save_edge_list_file(const std::string& path, const UniformHypergraph& h) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_edge_list(out, h);
}

}  // namespace qr
