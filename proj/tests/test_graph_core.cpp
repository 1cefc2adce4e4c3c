#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qrcert/generators.hpp"
#include "qrcert/reference.hpp"

using namespace qr;

namespace {

Graph from(int n, std::vector<Edge> edges) { return Graph::from_edges(n, edges); }

Graph cycle(int n) {
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return from(n, e);
}

VertexCut blocks(int n, int r) { return VertexCut::from_parts(n, consecutive_equipartition(n, r)); }

}  // namespace

TEST_CASE("graph invariants") {
  const Graph g = gen_gnp(40, 0.3, 5);
  long long degree_sum = 0;
  for (Vertex u = 0; u < g.n(); ++u) {
    CHECK_FALSE(g.has_edge(u, u));
    degree_sum += g.degree(u);
    for (Vertex v = 0; v < g.n(); ++v) CHECK(g.has_edge(u, v) == g.has_edge(v, u));
  }
  CHECK(static_cast<Count>(degree_sum) == 2 * g.num_edges());
  CHECK_THROWS(from(3, {{1, 1}}));
  CHECK(from(3, {{0, 1}, {1, 0}, {0, 1}}).num_edges() == 1);
}

TEST_CASE("edges_within") {
  const std::vector<Vertex> all4{0, 1, 2, 3};
  CHECK(edges_within(complete_graph(4), all4) == 6);
  const std::vector<Vertex> path{0, 1, 2};
  CHECK(edges_within(from(3, {{0, 1}, {1, 2}}), path) == 2);
  CHECK(edges_within(Graph(5), all4) == 0);
  const std::vector<Vertex> bad{0, 7};
  CHECK_THROWS_AS(edges_within(complete_graph(4), bad), std::out_of_range);
}

TEST_CASE("edges_between") {
  const std::vector<Vertex> x01{0, 1}, y23{2, 3}, x02{0, 2}, y13{1, 3};
  CHECK(edges_between(complete_graph(4), x01, y23) == 4);
  CHECK(edges_between(cycle(4), x02, y13) == 4);
  CHECK(edges_between(from(4, {{0, 1}, {2, 3}}), x01, y23) == 0);
  CHECK_THROWS_AS(edges_between(complete_graph(4), x01, x02), std::invalid_argument);
  CHECK(density_between(complete_graph(4), x01, y23) == 1.0);
}

TEST_CASE("triangles and cliques crossing") {
  CHECK(triangles_crossing(complete_graph(6), blocks(6, 3)) == 8);
  CHECK(triangles_crossing(complete_graph(6), blocks(6, 1)) == 0);
  CHECK(cliques_crossing(complete_graph(8), blocks(8, 4), 4) == 16);
  CHECK(cliques_crossing(cycle(7), sample_balanced_cut(7, balanced_alpha(3), 2), 3) == 0);
  CHECK(cliques_crossing(complete_graph(6), blocks(6, 2), 3) == 0);

  const Graph g30 = gen_gnp(30, 0.5, 7);
  const VertexCut c3 = sample_balanced_cut(30, balanced_alpha(3), 11);
  CHECK(triangles_crossing(g30, c3) == reference::cliques_crossing(g30, c3.assignment(), 3));

  const Graph g24 = gen_gnp(24, 0.6, 3);
  const VertexCut c4 = sample_balanced_cut(24, balanced_alpha(4), 13);
  CHECK(cliques_crossing(g24, c4, 4) == reference::cliques_crossing(g24, c4.assignment(), 4));
}

TEST_CASE("count_c4") {
  CHECK(count_c4(cycle(4)) == 1);
  CHECK(count_c4(complete_graph(4)) == 3);
  CHECK(count_c4(complete_graph(5)) == 15);
  CHECK(count_c4(cycle(5)) == 0);
  const Graph g = gen_gnp(25, 0.4, 9);
  CHECK(count_c4(g) == reference::count_c4(g));
}

TEST_CASE("clique_hypergraph") {
  CHECK(clique_hypergraph(complete_graph(4), 3).size() == 4);
  CHECK(clique_hypergraph(cycle(5), 3).size() == 0);
  const Graph g = gen_gnp(20, 0.5, 1);
  CHECK(clique_hypergraph(g, 3).size() == [&] {
    Count t = 0;
    for (Vertex a = 0; a < 20; ++a)
      for (Vertex b = a + 1; b < 20; ++b)
        for (Vertex c = b + 1; c < 20; ++c) t += g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c);
    return t;
  }());
  CHECK_THROWS(clique_hypergraph(g, 1));
}

TEST_CASE("hyperedges_crossing") {
  std::vector<std::vector<Vertex>> all;
  for (auto m : subsets_colex(6, 3)) all.push_back(mask_elements(m));
  const UniformHypergraph k63(6, 3, all);
  CHECK(hyperedges_crossing(k63, blocks(6, 3)) == 8);
  CHECK(hyperedges_crossing(k63, blocks(6, 2)) == 0);

  const Graph g = gen_gnp(20, 0.5, 1);
  const UniformHypergraph lift = clique_hypergraph(g, 3);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const VertexCut cut = sample_balanced_cut(20, balanced_alpha(4), s);
    CHECK(hyperedges_crossing(lift, cut) == triangles_crossing(g, cut));
  }
}

TEST_CASE("partition_stats") {
  const auto st = partition_stats(complete_graph(8), consecutive_equipartition(8, 4));
  for (int i = 0; i < 4; ++i) {
    CHECK(st.x(i) == 1.0);
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(st.d(i, j) == 1.0);
  }
  CHECK(st.min_pair_density() == 1.0);
  const auto empty = partition_stats(Graph(8), consecutive_equipartition(8, 2));
  CHECK(empty.x(0) == 0.0);
  CHECK(empty.d(0, 1) == 0.0);
  const Partition unequal{{0, 1, 2}, {3, 4}};
  CHECK_THROWS_AS(partition_stats(complete_graph(5), unequal), std::invalid_argument);

  const Graph h = gen_half_split(600, 0.3, 4);
  const auto hs = partition_stats(h, consecutive_equipartition(600, 2));
  CHECK(hs.x(0) == doctest::Approx(0.6).epsilon(0.05));
  CHECK(hs.d(0, 1) == doctest::Approx(0.3).epsilon(0.05));
  CHECK(hs.x(1) == 0.0);
}

TEST_CASE("decomposition and symmetry") {
  const Graph g = gen_gnp(31, 0.45, 17);
  const VertexCut cut = sample_balanced_cut(31, std::vector<double>{0.2, 0.3, 0.5}, 3);
  Count total = 0;
  for (int i = 0; i < cut.r(); ++i) {
    total += edges_within(g, cut.part(i));
    for (int j = i + 1; j < cut.r(); ++j) {
      total += edges_between(g, cut.part(i), cut.part(j));
      CHECK(edges_between(g, cut.part(i), cut.part(j)) == edges_between(g, cut.part(j), cut.part(i)));
    }
  }
  CHECK(total == g.num_edges());
}

TEST_CASE("part sizes") {
  CHECK(part_sizes(10, std::vector<double>{0.5, 0.5}) == std::vector<int>{5, 5});
  const auto s = part_sizes(10, balanced_alpha(3));
  CHECK(s[0] + s[1] + s[2] == 10);
  for (int v : s) CHECK((v == 3 || v == 4));
  CHECK(s == part_sizes(10, balanced_alpha(3)));
}

TEST_CASE("edge list round trip") {
  const Graph g = gen_gnp(30, 0.3, 2);
  std::stringstream ss;
  write_edge_list(ss, g);
  const std::string first = ss.str();
  const auto back = read_graph(ss);
  CHECK(back.graph == g);
  CHECK_FALSE(back.original_label);
  std::stringstream again;
  write_edge_list(again, back.graph);
  CHECK(again.str() == first);

  const UniformHypergraph h = clique_hypergraph(g, 3);
  std::stringstream hs;
  write_edge_list(hs, h);
  CHECK(read_hypergraph(hs).hypergraph == h);

  std::stringstream gaps("3 2\n10 20\n20 35\n");
  const auto relabeled = read_graph(gaps);
  CHECK(relabeled.graph.n() == 3);
  REQUIRE(relabeled.original_label);
  CHECK(*relabeled.original_label == std::vector<long long>{10, 20, 35});
}
