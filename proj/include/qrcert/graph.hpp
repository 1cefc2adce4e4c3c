#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include "qrcert/bitset.hpp"
#include "qrcert/combinatorics.hpp"

namespace qr {

using Count = std::uint64_t;
using Edge = std::pair<Vertex, Vertex>;
// Ordered list of disjoint vertex sets.
using Partition = std::vector<std::vector<Vertex>>;

// Undirected simple graph on vertices 0..n-1 with bit-set adjacency rows.
// Immutable once built.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  // Loops are rejected; repeated edges collapse.
  static Graph from_edges(int n, std::span<const Edge> edges);

  int n() const { return n_; }
  Count num_edges() const { return m_; }
  bool has_edge(Vertex u, Vertex v) const { return adj_[static_cast<std::size_t>(u)].test(static_cast<std::size_t>(v)); }
  const Bitset& neighbors(Vertex v) const { return adj_[static_cast<std::size_t>(v)]; }
  int degree(Vertex v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].count()); }

  // Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend class GraphBuilder;
  int n_ = 0;
  Count m_ = 0;
  std::vector<Bitset> adj_;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(int n);
  void add_edge(Vertex u, Vertex v);
  Graph build() &&;

 private:
  Graph g_;
};

// k-uniform hypergraph; edges are stored sorted and deduplicated.
class UniformHypergraph {
 public:
  UniformHypergraph() = default;
  // Each edge must have k distinct vertices in [0, n); duplicates are rejected.
  UniformHypergraph(int n, int k, std::vector<std::vector<Vertex>> edges);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return k_ == 0 ? 0 : flat_.size() / static_cast<std::size_t>(k_); }
  std::span<const Vertex> edge(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
  }

  friend bool operator==(const UniformHypergraph&, const UniformHypergraph&) = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<Vertex> flat_;
};

// Ordered partition of [n] into r parts.
class VertexCut {
 public:
  VertexCut() = default;
  // part_of[v] in [0, r). alpha defaults to the realized fractions; when
  // given, each |part i| must be floor or ceil of alpha_i * n.
  static VertexCut from_assignment(std::vector<int> part_of, int r,
                                   std::optional<std::vector<double>> alpha = std::nullopt);
  static VertexCut from_parts(int n, const Partition& parts,
                              std::optional<std::vector<double>> alpha = std::nullopt);

  int n() const { return static_cast<int>(part_of_.size()); }
  int r() const { return static_cast<int>(parts_.size()); }
  const Partition& parts() const { return parts_; }
  const std::vector<Vertex>& part(int i) const { return parts_[static_cast<std::size_t>(i)]; }
  const Bitset& part_bits(int i) const { return bits_[static_cast<std::size_t>(i)]; }
  int part_of(Vertex v) const { return part_of_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& assignment() const { return part_of_; }
  const std::vector<double>& alpha() const { return alpha_; }

  friend bool operator==(const VertexCut& a, const VertexCut& b) { return a.part_of_ == b.part_of_ && a.parts_.size() == b.parts_.size(); }

 private:
  std::vector<int> part_of_;
  Partition parts_;
  std::vector<Bitset> bits_;
  std::vector<double> alpha_;
};

// Within-part densities x_i = e(V_i)/C(m,2) and pairwise densities
// d_ij = e(V_i,V_j)/m^2 of an equipartition into t parts of size m.
class PartitionStats {
 public:
  PartitionStats() = default;
  // Direct construction from values (d is t*t row-major, symmetric; the
  // diagonal is ignored). Entries must lie in [0,1].
  PartitionStats(int part_size, std::vector<double> x, std::vector<double> d);

  int t() const { return static_cast<int>(x_.size()); }
  int part_size() const { return m_; }
  double x(int i) const { return x_[static_cast<std::size_t>(i)]; }
  double d(int i, int j) const { return d_[static_cast<std::size_t>(i) * x_.size() + static_cast<std::size_t>(j)]; }
  const std::vector<double>& x_values() const { return x_; }
  const std::vector<double>& d_values() const { return d_; }
  // min over i != j of d_ij (0 when t < 2).
  double min_pair_density() const;

 private:
  int m_ = 0;
  std::vector<double> x_;
  std::vector<double> d_;
};

// Counting kernels. Vertex sets are given as lists or bit sets over [n];
// out-of-range indices throw std::out_of_range.
Count edges_within(const Graph& g, const Bitset& u);
Count edges_within(const Graph& g, std::span<const Vertex> u);
// Throws std::invalid_argument if X and Y overlap.
Count edges_between(const Graph& g, const Bitset& x, const Bitset& y);
Count edges_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y);
double density_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y);

// Triangles with at most one vertex in each part.
Count triangles_crossing(const Graph& g, const VertexCut& cut);
// k-cliques with at most one vertex in each part; 0 when k > r.
Count cliques_crossing(const Graph& g, const VertexCut& cut, int k);
// k-cliques with exactly one vertex in each of the given (disjoint) sets.
Count cliques_across(const Graph& g, std::span<const Bitset> sets);

// Number of 4-cycle subgraphs (K4 contributes 3).
Count count_c4(const Graph& g);

// k-uniform hypergraph whose edges are the k-cliques of g.
UniformHypergraph clique_hypergraph(const Graph& g, int k);

Count hyperedges_crossing(const UniformHypergraph& h, const VertexCut& cut);

// Requires all parts of equal size; throws std::invalid_argument otherwise.
PartitionStats partition_stats(const Graph& g, const Partition& parts);

// d_J = (k-cliques with one vertex in each V_j, j in J) / m^k over the
// k-subsets J of [t], colex order. Parts must have equal size m.
DensityVectorK clique_density_vector(const Graph& g, const Partition& parts, int k);
// Same for hyperedges of h with one vertex in each part of J.
DensityVectorK hyperedge_density_vector(const UniformHypergraph& h, const Partition& parts);

// Equipartition of [n] into t consecutive blocks, n divisible by t.
Partition consecutive_equipartition(int n, int t);

// Edge-list text format. Graph: "n m" then one "u v" line per edge.
// Hypergraph: "n m k" then k vertex indices per line. Writers emit the
// canonical (sorted) form.
struct LoadedGraph {
  Graph graph;
  // When the input used labels outside [0, n), original_label[v] is the
  // label that was mapped to vertex v.
  std::optional<std::vector<long long>> original_label;
};
struct LoadedHypergraph {
  UniformHypergraph hypergraph;
  std::optional<std::vector<long long>> original_label;
};

void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(std::ostream& out, const UniformHypergraph& h);
LoadedGraph read_graph(std::istream& in);
LoadedHypergraph read_hypergraph(std::istream& in);
LoadedGraph load_graph_file(const std::string& path);
LoadedHypergraph load_hypergraph_file(const std::string& path);
void save_edge_list_file(const std::string& path, const Graph& g);
void save_edge_list_file(const std::string& path, const UniformHypergraph& h);

}  // namespace qr
