#include "qrcert/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "qrcert/parallel.hpp"

namespace qr {

namespace {

void check_vertex(int n, Vertex v) {
  if (v < 0 || v >= n) throw std::out_of_range("vertex " + std::to_string(v) + " out of range [0," + std::to_string(n) + ")");
}

Bitset to_bits(int n, std::span<const Vertex> vs) { return Bitset::from_vertices(static_cast<std::size_t>(n), vs); }

// Reusable per-depth candidate sets for clique recursion.
class CliqueCounter {
 public:
  CliqueCounter(const Graph& g, int depth) : g_(g), stack_(static_cast<std::size_t>(depth) + 1, Bitset(static_cast<std::size_t>(g.n()))) {}

  // Cliques with one vertex in each sets[level..], all adjacent to the
  // vertices chosen so far (whose common neighborhood is stack_[level]).
  Count across(std::span<const Bitset> sets, std::size_t level) {
    const Bitset& cand = stack_[level];
    if (level + 1 == sets.size()) return intersect_count(cand, sets[level]);
    Count total = 0;
    Bitset& next = stack_[level + 1];
    const auto cw = cand.words();
    const auto sw = sets[level].words();
    for (std::size_t w = 0; w < cw.size(); ++w) {
      std::uint64_t word = cw[w] & sw[w];
      while (word) {
        const auto v = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
        word &= word - 1;
        next = cand;
        next &= g_.neighbors(v);
        total += across(sets, level + 1);
      }
    }
    return total;
  }

  // Cliques with `remaining` more vertices, each in a distinct part with
  // index > last_part. suffix[q] is the union of parts q..r-1.
  Count crossing(const VertexCut& cut, const std::vector<Bitset>& suffix, int remaining, int first_part,
                 std::size_t level) {
    const Bitset& cand = stack_[level];
    if (remaining == 1) {
      if (first_part >= cut.r()) return 0;
      return intersect_count(cand, suffix[static_cast<std::size_t>(first_part)]);
    }
    Count total = 0;
    Bitset& next = stack_[level + 1];
    for (int q = first_part; q + remaining <= cut.r(); ++q) {
      const auto cw = cand.words();
      const auto pw = cut.part_bits(q).words();
      for (std::size_t w = 0; w < cw.size(); ++w) {
        std::uint64_t word = cw[w] & pw[w];
        while (word) {
          const auto v = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
          word &= word - 1;
          next = cand;
          next &= g_.neighbors(v);
          total += crossing(cut, suffix, remaining - 1, q + 1, level + 1);
        }
      }
    }
    return total;
  }

  Bitset& root() { return stack_[0]; }

 private:
  const Graph& g_;
  std::vector<Bitset> stack_;
};

Bitset full_set(int n) {
  Bitset b(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) b.set(static_cast<std::size_t>(v));
  return b;
}

void require_equal_parts(const Partition& parts, int n) {
  if (parts.empty()) throw std::invalid_argument("partition has no parts");
  const std::size_t m = parts.front().size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& p : parts) {
    if (p.size() != m) throw std::invalid_argument("partition parts must have equal size");
    for (Vertex v : p) {
      check_vertex(n, v);
      if (seen[static_cast<std::size_t>(v)]++) throw std::invalid_argument("partition parts overlap");
    }
  }
}

}  // namespace

// ---- Graph ----

Graph::Graph(int n) : n_(n), adj_(static_cast<std::size_t>(n), Bitset(static_cast<std::size_t>(n))) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
}

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  GraphBuilder b(n);
  for (const auto& [u, v] : edges) b.add_edge(u, v);
  return std::move(b).build();
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (Vertex u = 0; u < n_; ++u)
    adj_[static_cast<std::size_t>(u)].for_each([&](Vertex v) {
      if (v > u) out.emplace_back(u, v);
    });
  return out;
}

GraphBuilder::GraphBuilder(int n) : g_(n) {}

void GraphBuilder::add_edge(Vertex u, Vertex v) {
  check_vertex(g_.n_, u);
  check_vertex(g_.n_, v);
  if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
  auto& row = g_.adj_[static_cast<std::size_t>(u)];
  if (row.test(static_cast<std::size_t>(v))) return;
  row.set(static_cast<std::size_t>(v));
  g_.adj_[static_cast<std::size_t>(v)].set(static_cast<std::size_t>(u));
  ++g_.m_;
}

Graph GraphBuilder::build() && { return std::move(g_); }

// ---- UniformHypergraph ----

UniformHypergraph::UniformHypergraph(int n, int k, std::vector<std::vector<Vertex>> edges) : n_(n), k_(k) {
  if (n < 0 || k < 1) throw std::invalid_argument("hypergraph needs n >= 0 and k >= 1");
  for (auto& e : edges) {
    if (static_cast<int>(e.size()) != k) throw std::invalid_argument("hyperedge with wrong size");
    std::sort(e.begin(), e.end());
    for (Vertex v : e) check_vertex(n, v);
    if (std::adjacent_find(e.begin(), e.end()) != e.end())
      throw std::invalid_argument("hyperedge with repeated vertex");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate hyperedge");
  flat_.reserve(edges.size() * static_cast<std::size_t>(k));
  for (const auto& e : edges) flat_.insert(flat_.end(), e.begin(), e.end());
}

// ---- VertexCut ----

VertexCut VertexCut::from_assignment(std::vector<int> part_of, int r, std::optional<std::vector<double>> alpha) {
  if (r < 1) throw std::invalid_argument("cut needs at least one part");
  const int n = static_cast<int>(part_of.size());
  VertexCut cut;
  cut.parts_.assign(static_cast<std::size_t>(r), {});
  cut.bits_.assign(static_cast<std::size_t>(r), Bitset(static_cast<std::size_t>(n)));
  for (Vertex v = 0; v < n; ++v) {
    const int p = part_of[static_cast<std::size_t>(v)];
    if (p < 0 || p >= r) throw std::invalid_argument("part index out of range for vertex " + std::to_string(v));
    cut.parts_[static_cast<std::size_t>(p)].push_back(v);
    cut.bits_[static_cast<std::size_t>(p)].set(static_cast<std::size_t>(v));
  }
  if (alpha) {
    if (static_cast<int>(alpha->size()) != r) throw std::invalid_argument("alpha length differs from part count");
    for (int i = 0; i < r; ++i) {
      const double target = (*alpha)[static_cast<std::size_t>(i)] * n;
      const auto size = static_cast<double>(cut.parts_[static_cast<std::size_t>(i)].size());
      if (size < std::floor(target - 1e-9) || size > std::ceil(target + 1e-9))
        throw std::invalid_argument("part " + std::to_string(i) + " size does not match alpha");
    }
    cut.alpha_ = std::move(*alpha);
  } else {
    cut.alpha_.resize(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i)
      cut.alpha_[static_cast<std::size_t>(i)] =
          n == 0 ? 0.0 : static_cast<double>(cut.parts_[static_cast<std::size_t>(i)].size()) / n;
  }
  cut.part_of_ = std::move(part_of);
  return cut;
}

VertexCut VertexCut::from_parts(int n, const Partition& parts, std::optional<std::vector<double>> alpha) {
  std::vector<int> part_of(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (Vertex v : parts[i]) {
      check_vertex(n, v);
      if (part_of[static_cast<std::size_t>(v)] != -1) throw std::invalid_argument("cut parts overlap");
      part_of[static_cast<std::size_t>(v)] = static_cast<int>(i);
    }
  if (std::find(part_of.begin(), part_of.end(), -1) != part_of.end())
    throw std::invalid_argument("cut parts do not cover the vertex set");
  return from_assignment(std::move(part_of), static_cast<int>(parts.size()), std::move(alpha));
}

// ---- PartitionStats ----

PartitionStats::PartitionStats(int part_size, std::vector<double> x, std::vector<double> d)
    : m_(part_size), x_(std::move(x)), d_(std::move(d)) {
  const std::size_t t = x_.size();
  if (d_.size() != t * t) throw std::invalid_argument("pair density matrix must be t x t");
  for (double v : x_)
    if (!(v >= 0 && v <= 1)) throw std::invalid_argument("within-part density outside [0,1]");
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      if (i == j) continue;
      const double v = d_[i * t + j];
      if (!(v >= 0 && v <= 1)) throw std::invalid_argument("pair density outside [0,1]");
      if (v != d_[j * t + i]) throw std::invalid_argument("pair density matrix not symmetric");
    }
}

double PartitionStats::min_pair_density() const {
  const int t = this->t();
  if (t < 2) return 0.0;
  double best = 1.0;
  for (int i = 0; i < t; ++i)
    for (int j = i + 1; j < t; ++j) best = std::min(best, d(i, j));
  return best;
}

// ---- counting ----

Count edges_within(const Graph& g, const Bitset& u) {
  if (u.size() != static_cast<std::size_t>(g.n())) throw std::invalid_argument("vertex set size mismatch");
  Count twice = 0;
  u.for_each([&](Vertex v) { twice += intersect_count(g.neighbors(v), u); });
  return twice / 2;
}

Count edges_within(const Graph& g, std::span<const Vertex> u) { return edges_within(g, to_bits(g.n(), u)); }

Count edges_between(const Graph& g, const Bitset& x, const Bitset& y) {
  if (x.intersects(y)) throw std::invalid_argument("edges_between requires disjoint vertex sets");
  Count total = 0;
  x.for_each([&](Vertex v) { total += intersect_count(g.neighbors(v), y); });
  return total;
}

Count edges_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y) {
  return edges_between(g, to_bits(g.n(), x), to_bits(g.n(), y));
}

double density_between(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("density of an empty vertex set");
  return static_cast<double>(edges_between(g, x, y)) / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

Count cliques_across(const Graph& g, std::span<const Bitset> sets) {
  if (sets.empty()) return 1;
  for (const auto& s : sets)
    if (s.size() != static_cast<std::size_t>(g.n())) throw std::invalid_argument("vertex set size mismatch");
  CliqueCounter counter(g, static_cast<int>(sets.size()));
  counter.root() = full_set(g.n());
  return counter.across(sets, 0);
}

Count cliques_crossing(const Graph& g, const VertexCut& cut, int k) {
  if (cut.n() != g.n()) throw std::invalid_argument("cut does not cover the graph's vertex set");
  if (k < 1) throw std::invalid_argument("clique size must be positive");
  if (k > cut.r()) return 0;
  std::vector<Bitset> suffix(static_cast<std::size_t>(cut.r()) + 1, Bitset(static_cast<std::size_t>(g.n())));
  for (int q = cut.r() - 1; q >= 0; --q) {
    suffix[static_cast<std::size_t>(q)] = suffix[static_cast<std::size_t>(q) + 1];
    suffix[static_cast<std::size_t>(q)] |= cut.part_bits(q);
  }
  CliqueCounter counter(g, k);
  counter.root() = full_set(g.n());
  return counter.crossing(cut, suffix, k, 0, 0);
}

Count triangles_crossing(const Graph& g, const VertexCut& cut) { return cliques_crossing(g, cut, 3); }

Count count_c4(const Graph& g) {
  const int n = g.n();
  std::vector<Count> per_vertex(static_cast<std::size_t>(n), 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t u) {
    Count acc = 0;
    for (int v = static_cast<int>(u) + 1; v < n; ++v) {
      const Count c = intersect_count(g.neighbors(static_cast<Vertex>(u)), g.neighbors(v));
      acc += c * (c - (c > 0 ? 1 : 0)) / 2;
    }
    per_vertex[u] = acc;
  });
  Count total = 0;
  for (Count c : per_vertex) total += c;
  // Each 4-cycle is seen once through each of its two diagonals.
  return total / 2;
}

UniformHypergraph clique_hypergraph(const Graph& g, int k) {
  if (k < 2) throw std::invalid_argument("clique size must be at least 2");
  const int n = g.n();
  std::vector<std::vector<Vertex>> cliques;
  std::vector<Vertex> current;
  std::vector<Bitset> stack(static_cast<std::size_t>(k) + 1, Bitset(static_cast<std::size_t>(n)));
  // Candidates at each depth are common neighbours with a larger index.
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (static_cast<int>(depth) == k) {
      cliques.push_back(current);
      return;
    }
    stack[depth].for_each([&](Vertex v) {
      current.push_back(v);
      Bitset& next = stack[depth + 1];
      next = stack[depth];
      next &= g.neighbors(v);
      for (int w = 0; w <= v; ++w) next.reset(static_cast<std::size_t>(w));
      self(self, depth + 1);
      current.pop_back();
    });
  };
  stack[0] = full_set(n);
  recurse(recurse, 0);
  return UniformHypergraph(n, k, std::move(cliques));
}

Count hyperedges_crossing(const UniformHypergraph& h, const VertexCut& cut) {
  if (cut.n() != h.n()) throw std::invalid_argument("cut does not cover the hypergraph's vertex set");
  Count total = 0;
  std::vector<int> seen(static_cast<std::size_t>(cut.r()), -1);
  for (std::size_t e = 0; e < h.size(); ++e) {
    bool crosses = true;
    for (Vertex v : h.edge(e)) {
      int& mark = seen[static_cast<std::size_t>(cut.part_of(v))];
      if (mark == static_cast<int>(e)) {
        crosses = false;
        break;
      }
      mark = static_cast<int>(e);
    }
    if (crosses) ++total;
  }
  return total;
}

PartitionStats partition_stats(const Graph& g, const Partition& parts) {
  require_equal_parts(parts, g.n());
  const std::size_t t = parts.size();
  const auto m = static_cast<double>(parts.front().size());
  std::vector<Bitset> bits;
  bits.reserve(t);
  for (const auto& p : parts) bits.push_back(to_bits(g.n(), p));
  std::vector<double> x(t, 0.0), d(t * t, 0.0);
  const double pairs_within = m * (m - 1) / 2;
  for (std::size_t i = 0; i < t; ++i) {
    x[i] = pairs_within > 0 ? static_cast<double>(edges_within(g, bits[i])) / pairs_within : 0.0;
    for (std::size_t j = i + 1; j < t; ++j) {
      const double v = m > 0 ? static_cast<double>(edges_between(g, bits[i], bits[j])) / (m * m) : 0.0;
      d[i * t + j] = d[j * t + i] = v;
    }
  }
  return PartitionStats(static_cast<int>(m), std::move(x), std::move(d));
}

DensityVectorK clique_density_vector(const Graph& g, const Partition& parts, int k) {
  require_equal_parts(parts, g.n());
  const int t = static_cast<int>(parts.size());
  if (k < 1 || k > t) throw std::invalid_argument("density vector needs 1 <= k <= t");
  std::vector<Bitset> bits;
  for (const auto& p : parts) bits.push_back(to_bits(g.n(), p));
  DensityVectorK out(t, k);
  const auto masks = subsets_colex(t, k);
  const double scale = std::pow(static_cast<double>(parts.front().size()), k);
  parallel_for(masks.size(), [&](std::size_t idx) {
    std::vector<Bitset> sets;
    for (int e : mask_elements(masks[idx])) sets.push_back(bits[static_cast<std::size_t>(e)]);
    out.values[idx] = static_cast<double>(cliques_across(g, sets)) / scale;
  });
  return out;
}

DensityVectorK hyperedge_density_vector(const UniformHypergraph& h, const Partition& parts) {
  require_equal_parts(parts, h.n());
  const int t = static_cast<int>(parts.size());
  const int k = h.k();
  if (k > t) throw std::invalid_argument("density vector needs k <= t");
  std::vector<int> part_of(static_cast<std::size_t>(h.n()), -1);
  for (int i = 0; i < t; ++i)
    for (Vertex v : parts[static_cast<std::size_t>(i)]) part_of[static_cast<std::size_t>(v)] = i;
  std::vector<Count> counts(binomial(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k)), 0);
  for (std::size_t e = 0; e < h.size(); ++e) {
    std::uint64_t mask = 0;
    bool ok = true;
    for (Vertex v : h.edge(e)) {
      const int p = part_of[static_cast<std::size_t>(v)];
      if (p < 0 || (mask >> p) & 1U) {
        ok = false;
        break;
      }
      mask |= std::uint64_t{1} << p;
    }
    if (ok) ++counts[colex_rank(mask)];
  }
  DensityVectorK out(t, k);
  const double scale = std::pow(static_cast<double>(parts.front().size()), k);
  for (std::size_t i = 0; i < counts.size(); ++i) out.values[i] = static_cast<double>(counts[i]) / scale;
  return out;
}

Partition consecutive_equipartition(int n, int t) {
  if (t < 1 || n % t != 0) throw std::invalid_argument("n must be divisible by the part count");
  const int m = n / t;
  Partition parts(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < m; ++j) parts[static_cast<std::size_t>(i)].push_back(i * m + j);
  return parts;
}

}  // namespace qr
