#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qrcert/cut_engine.hpp"
#include "qrcert/parallel.hpp"

using namespace qr;

namespace {

SearchOptions opts(std::uint64_t budget, std::uint64_t seed = 1) {
  SearchOptions o;
  o.budget = budget;
  o.seed = seed;
  return o;
}

const std::vector<double> halves{0.5, 0.5};
const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};

bool has_flag(const DeviationReport& r, const std::string& flag) {
  return std::find(r.flags.begin(), r.flags.end(), flag) != r.flags.end();
}

void check_witness(const DeviationReport& r, const Graph* g, const UniformHypergraph* h = nullptr) {
  CHECK(reevaluate_witness(r, g, h) == r.max_abs_deviation);
  const auto back = DeviationReport::from_text(r.to_text());
  CHECK(back.to_text() == r.to_text());
  CHECK(reevaluate_witness(back, g, h) == r.max_abs_deviation);
}

UniformHypergraph complete_hypergraph(int n, int k) {
  std::vector<std::vector<Vertex>> edges;
  for (auto m : subsets_colex(n, k)) edges.push_back(mask_elements(m));
  return UniformHypergraph(n, k, edges);
}

}  // namespace

TEST_CASE("check_p1") {
  const Graph k12 = complete_graph(12);
  const auto r12 = check_p1(k12, 1.0, opts(100));
  CHECK(r12.mode == Mode::exhaustive);
  CHECK(r12.samples == 4096);
  CHECK(r12.max_abs_deviation <= 1.0 / 24);
  check_witness(r12, &k12);

  const Graph k40 = complete_graph(40);
  const auto r40 = check_p1(k40, 1.0, opts(500));
  CHECK(r40.mode == Mode::sampled);
  CHECK(r40.estimate);
  CHECK(r40.max_abs_deviation <= 1.0 / 80);
  check_witness(r40, &k40);

  const Graph hs = gen_half_split(600, 0.3, 21);
  const auto sep = check_p1(hs, 0.3, opts(2000));
  CHECK(sep.max_abs_deviation >= 0.03);
  check_witness(sep, &hs);
  // The dense half alone already attains the analytic gap.
  std::vector<Vertex> dense(300);
  for (int v = 0; v < 300; ++v) dense[static_cast<std::size_t>(v)] = v;
  CHECK(subset_deviation(hs, dense, 0.3) == doctest::Approx(0.0375).epsilon(0.05));

  const Graph g = gen_gnp(600, 0.5, 4);
  CHECK(check_p1(g, 0.5, opts(10'000)).max_abs_deviation <= 0.02);
}

TEST_CASE("check_p2") {
  const Graph k30 = complete_graph(30);
  const auto full = check_p2(k30, 1.0, 0.5, opts(500));
  CHECK(full.max_abs_deviation <= 1.0 / 60);
  check_witness(full, &k30);
  const Graph e30(30);
  CHECK(check_p2(e30, 0.0, 0.5, opts(100)).max_abs_deviation == 0.0);

  const Graph hs = gen_half_split(600, 0.3, 21);
  const auto half = check_p2(hs, 0.3, 0.5, opts(1000));
  CHECK(half.max_abs_deviation >= 0.009);
  check_witness(half, &hs);
  REQUIRE(half.witness.kind == Witness::Kind::subset);
  CHECK(half.witness.subset.size() == 300);

  CHECK_THROWS_AS(check_p2(k30, 1.0, 0.05, opts(10)), std::invalid_argument);
  CHECK_THROWS_AS(check_p2(k30, 1.0, 1.0, opts(10)), std::invalid_argument);

  // Exhaustive at small n: every subset of each allowed size.
  const Graph small = gen_gnp(14, 0.5, 2);
  const auto ex = check_p2(small, 0.5, 0.5, opts(10));
  CHECK(ex.mode == Mode::exhaustive);
  CHECK(ex.samples == 3432);
  check_witness(ex, &small);
}

TEST_CASE("check_p3") {
  const Graph k40 = complete_graph(40);
  const auto r = check_p3(k40, 1.0);
  CHECK(r.metric("c4_deviation") <= 1.0 / 40);
  CHECK(r.metric("edge_deviation") <= 1.0 / 40);
  CHECK(r.max_abs_deviation == std::max(r.metric("c4_deviation"), r.metric("edge_deviation")));
  const auto e = check_p3(Graph(20), 0.0);
  CHECK(e.metric("c4_deviation") == 0.0);
  CHECK(e.metric("edge_deviation") == 0.0);
  const auto g = check_p3(gen_gnp(400, 0.5, 6), 0.5);
  CHECK(g.metric("c4_deviation") <= 0.01);
  CHECK(g.metric("edge_deviation") <= 0.01);
  CHECK_THROWS(r.metric("nonexistent"));
}

TEST_CASE("check_cut_graph") {
  const Graph k30 = complete_graph(30);
  CHECK(check_cut_graph(k30, 1.0, halves, opts(300)).max_abs_deviation <= 1.0 / 30);
  const Graph hs = gen_half_split(600, 0.3, 21);
  const auto r = check_cut_graph(hs, 0.3, halves, opts(10'000));
  CHECK(r.max_abs_deviation <= 0.02);
  CHECK(r.samples == 10'000);
  check_witness(r, &hs);
  CHECK(has_flag(r, "enumeration_over_budget"));

  const Graph small = gen_gnp(10, 0.5, 3);
  const auto ex = check_cut_graph(small, 0.5, thirds, opts(5));
  CHECK(ex.mode == Mode::exhaustive);
  CHECK(ex.samples == *count_cuts(10, thirds));
  check_witness(ex, &small);
  CHECK_THROWS_AS(check_cut_graph(small, 0.5, std::vector<double>{1.0}, opts(5)), std::invalid_argument);
}

TEST_CASE("check_cut_hypergraph") {
  const auto h = complete_hypergraph(24, 3);
  const auto full = check_cut_hypergraph(h, 1.0, thirds, opts(200));
  CHECK(full.max_abs_deviation <= 3.0 / 24);
  check_witness(full, nullptr, &h);
  const UniformHypergraph empty(24, 3, {});
  CHECK(check_cut_hypergraph(empty, 0.0, thirds, opts(50)).max_abs_deviation == 0.0);
  const Graph g = gen_gnp(200, 0.5, 8);
  const auto lift = clique_hypergraph(g, 3);
  const auto r = check_cut_hypergraph(lift, 0.125, thirds, opts(200));
  CHECK(r.max_abs_deviation <= 0.02);
  check_witness(r, nullptr, &lift);
  CHECK_THROWS_AS(check_cut_hypergraph(lift, 0.125, halves, opts(5)), std::invalid_argument);
}

TEST_CASE("check_clique_cut") {
  const Graph k30 = complete_graph(30);
  CHECK(check_clique_cut(k30, 1.0, 3, thirds, opts(200)).max_abs_deviation <= 3.0 / 30);

  std::vector<Edge> bip;
  for (Vertex u = 0; u < 15; ++u)
    for (Vertex v = 15; v < 30; ++v) bip.emplace_back(u, v);
  const Graph kb = Graph::from_edges(30, bip);
  const auto tf = check_clique_cut(kb, 0.5, 3, thirds, opts(50));
  CHECK(tf.max_abs_deviation == doctest::Approx(0.125 / 27).epsilon(1e-12));
  check_witness(tf, &kb);

  const Graph g = gen_gnp(300, 0.5, 12);
  const auto r = check_clique_cut(g, 0.5, 3, thirds, opts(200));
  CHECK(r.max_abs_deviation <= 0.02);
  check_witness(r, &g);
  CHECK_THROWS_AS(check_clique_cut(g, 0.5, 3, halves, opts(5)), std::invalid_argument);
  CHECK_THROWS_AS(check_clique_cut(g, 0.5, 1, halves, opts(5)), std::invalid_argument);
}

TEST_CASE("k = 2 clique cut agrees with the cut property") {
  const Graph g = gen_gnp(120, 0.4, 5);
  for (const auto* alpha : {&halves, &thirds}) {
    const auto a = check_clique_cut(g, 0.4, 2, *alpha, opts(300, 9));
    const auto b = check_cut_graph(g, 0.4, *alpha, opts(300, 9));
    CHECK(a.max_abs_deviation == b.max_abs_deviation);
    CHECK(a.witness.to_text() == b.witness.to_text());
  }
}

TEST_CASE("regularity") {
  std::vector<Vertex> x, y;
  for (int v = 0; v < 100; ++v) x.push_back(v);
  for (int v = 100; v < 200; ++v) y.push_back(v);
  std::vector<Edge> all, half;
  for (Vertex u : x)
    for (Vertex v : y) {
      all.emplace_back(u, v);
      if (u < 50) half.emplace_back(u, v);
    }
  const Graph kxy = Graph::from_edges(200, all);
  const auto zero = regularity_deviation(kxy, x, y, 0.1, 200, 3);
  CHECK(zero.max_abs_deviation == 0.0);
  CHECK(zero.estimate);
  CHECK(has_flag(zero, "lower_bound_estimate"));

  const Graph irregular = Graph::from_edges(200, half);
  for (double eps : {0.1, 0.3, 0.5}) {
    const auto r = regularity_deviation(irregular, x, y, eps, 200, 3);
    CHECK(r.max_abs_deviation >= 0.25);
    check_witness(r, &irregular);
  }

  const auto blocks = gen_gnp(400, 0.5, 4);
  std::vector<Vertex> bx, by;
  for (int v = 0; v < 200; ++v) bx.push_back(v);
  for (int v = 200; v < 400; ++v) by.push_back(v);
  const auto r = regularity_deviation(blocks, bx, by, 0.1, 500, 5);
  CHECK(r.max_abs_deviation <= 0.2);
  check_witness(r, &blocks);
  CHECK_THROWS_AS(regularity_deviation(blocks, std::vector<Vertex>{0, 1}, by, 0.1, 10, 1), std::invalid_argument);
}

TEST_CASE("monotone budgets") {
  const Graph g = gen_gnp(80, 0.5, 14);
  double prev_p1 = 0, prev_cut = 0, prev_p2 = 0;
  for (std::uint64_t b : {10u, 40u, 160u, 640u}) {
    const double p1 = check_p1(g, 0.5, opts(b, 3)).max_abs_deviation;
    const double p2 = check_p2(g, 0.5, 0.5, opts(b, 3)).max_abs_deviation;
    const double cut = check_cut_graph(g, 0.5, thirds, opts(b, 3)).max_abs_deviation;
    CHECK(p1 >= prev_p1);
    CHECK(p2 >= prev_p2);
    CHECK(cut >= prev_cut);
    prev_p1 = p1;
    prev_p2 = p2;
    prev_cut = cut;
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const Graph g = gen_gnp(150, 0.5, 2);
  const unsigned saved = thread_count();
  std::vector<std::string> texts;
  for (unsigned t : {1u, 2u, 5u}) {
    set_thread_count(t);
    texts.push_back(check_p1(g, 0.5, opts(300)).to_text() + check_clique_cut(g, 0.5, 3, thirds, opts(300)).to_text() +
                    check_p2(g, 0.5, 0.3, opts(300)).to_text());
  }
  set_thread_count(saved);
  CHECK(texts[0] == texts[1]);
  CHECK(texts[0] == texts[2]);
}

TEST_CASE("witness text") {
  Witness w;
  w.kind = Witness::Kind::cut;
  w.parts = 2;
  w.assignment = {0, 1, 1, 0};
  CHECK(w.to_text() == "cut:0,3|1,2");
  CHECK(Witness::from_text("cut:0,3|1,2", 4).assignment == w.assignment);
  CHECK(Witness::from_text("subset:0,1,2", 5).subset == std::vector<Vertex>{0, 1, 2});
  CHECK(Witness::from_text("none", 5).kind == Witness::Kind::none);
  CHECK_THROWS(Witness::from_text("cut:0,1|1,2", 3));
  CHECK_THROWS(Witness::from_text("cut:0|1", 3));
  CHECK_THROWS(Witness::from_text("subset:9", 5));
}

TEST_CASE("tampered report does not reproduce") {
  const Graph g = gen_gnp(50, 0.5, 1);
  auto r = check_cut_graph(g, 0.5, halves, opts(100));
  r.max_abs_deviation += 1e-9;
  CHECK(reevaluate_witness(r, &g, nullptr) != r.max_abs_deviation);
}

TEST_CASE("property names") {
  for (auto p : {Property::p1, Property::p2, Property::p3, Property::cut_graph, Property::cut_hypergraph, Property::clique_cut,
                 Property::regularity})
    CHECK(parse_property(property_name(p)) == p);
  CHECK_THROWS_AS(parse_property("p9"), std::invalid_argument);
}
