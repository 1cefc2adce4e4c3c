#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "qrcert/generators.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/rng.hpp"

using namespace qr;

namespace {

std::string canonical(const Graph& g) {
  std::ostringstream ss;
  write_edge_list(ss, g);
  return ss.str();
}

}  // namespace

TEST_CASE("gnp") {
  CHECK(gen_gnp(20, 0.0, 1).num_edges() == 0);
  CHECK(gen_gnp(20, 1.0, 1) == complete_graph(20));
  const double pairs = 1000.0 * 999 / 2;
  const double sigma = std::sqrt(pairs * 0.25);
  for (std::uint64_t seed : {1u, 2u, 3u})
    CHECK(std::abs(static_cast<double>(gen_gnp(1000, 0.5, seed).num_edges()) - 0.5 * pairs) <= 3 * sigma);
  CHECK(canonical(gen_gnp(200, 0.3, 42)) == canonical(gen_gnp(200, 0.3, 42)));
  CHECK(canonical(gen_gnp(200, 0.3, 42)) != canonical(gen_gnp(200, 0.3, 43)));
}

TEST_CASE("gnp does not depend on the thread count") {
  const unsigned saved = thread_count();
  set_thread_count(1);
  const std::string one = canonical(gen_gnp(300, 0.4, 8));
  set_thread_count(3);
  const std::string three = canonical(gen_gnp(300, 0.4, 8));
  set_thread_count(saved);
  CHECK(one == three);
}

TEST_CASE("half split") {
  CHECK(gen_half_split(40, 0.0, 3).num_edges() == 0);
  const Graph g = gen_half_split(40, 0.5, 3);
  for (Vertex u = 0; u < 20; ++u)
    for (Vertex v = u + 1; v < 20; ++v) CHECK(g.has_edge(u, v));
  for (Vertex u = 20; u < 40; ++u)
    for (Vertex v = u + 1; v < 40; ++v) CHECK_FALSE(g.has_edge(u, v));
  CHECK_THROWS_AS(gen_half_split(40, 0.6, 3), std::invalid_argument);
  CHECK_THROWS_AS(gen_half_split(41, 0.3, 3), std::invalid_argument);
}

TEST_CASE("half split cut identity") {
  // Every half cut has p n^2 / 4 crossing edges in expectation; average a
  // few cuts with different dense-half overlaps over many graphs.
  const int n = 40;
  const double p = 0.3;
  for (int a : {0, 5, 10, 17}) {
    std::vector<Vertex> u, w;
    for (Vertex v = 0; v < n; ++v) {
      const bool in_u = v < a || (v >= 20 && v < 40 - a);
      (in_u ? u : w).push_back(v);
    }
    REQUIRE(u.size() == 20);
    double total = 0;
    const int graphs = 400;
    for (int s = 0; s < graphs; ++s) total += static_cast<double>(edges_between(gen_half_split(n, p, static_cast<std::uint64_t>(s)), u, w));
    CHECK(total / graphs == doctest::Approx(p * n * n / 4).epsilon(0.02));
  }
}

TEST_CASE("half split cut identity at n = 600") {
  const Graph g = gen_half_split(600, 0.3, 11);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const VertexCut c = sample_balanced_cut(600, balanced_alpha(2), s);
    const double e = static_cast<double>(edges_between(g, c.part(0), c.part(1)));
    CHECK(std::abs(e - 0.3 * 600 * 600 / 4) <= 0.01 * 600 * 600);
  }
}

TEST_CASE("planted structure targets") {
  const auto st = planted_targets(4, 100, 2, 0.25, 0.36);
  CHECK(st.x(0) == doctest::Approx(0.5));
  CHECK(st.d(0, 1) == doctest::Approx(0.5));
  CHECK(st.d(0, 2) == doctest::Approx(0.6));
  CHECK(st.x(2) == doctest::Approx(0.5 * (0.72 - 0.25) / 0.36));
  CHECK(st.x(2) == doctest::Approx(0.65278).epsilon(1e-5));

  const auto uniform = planted_targets(5, 10, 0, 0.49, 0.49);
  for (int i = 0; i < 5; ++i) {
    CHECK(uniform.x(i) == doctest::Approx(0.7));
    for (int j = 0; j < 5; ++j)
      if (i != j) CHECK(uniform.d(i, j) == doctest::Approx(0.7));
  }

  // The triple identity x_i d_ik^2 + x_j d_jk^2 - 2 d_ij d_ik d_jk = 0 on the targets.
  for (int s = 0; s < 6; ++s) {
    const auto t = planted_targets(6, 10, s, 0.25, 0.36);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) {
          if (i == j || j == k || i == k) continue;
          const double r = t.x(i) * t.d(i, k) * t.d(i, k) + t.x(j) * t.d(j, k) * t.d(j, k) - 2 * t.d(i, j) * t.d(i, k) * t.d(j, k);
          CHECK(std::abs(r) <= 1e-15);
        }
  }
}

TEST_CASE("planted structure sample") {
  const int t = 4, m = 300;
  const auto g = gen_planted_structure(t, m, 1, 0.25, 0.36, 5);
  REQUIRE(g.parts.size() == 4);
  const auto target = planted_targets(t, m, 1, 0.25, 0.36);
  const auto got = partition_stats(g.graph, g.parts);
  const double within = m * (m - 1) / 2.0, across = static_cast<double>(m) * m;
  for (int i = 0; i < t; ++i) {
    const double q = target.x(i);
    CHECK(std::abs(got.x(i) - q) <= 3 * std::sqrt(q * (1 - q) / within));
    for (int j = i + 1; j < t; ++j) {
      const double d = target.d(i, j);
      CHECK(std::abs(got.d(i, j) - d) <= 3 * std::sqrt(d * (1 - d) / across));
    }
  }
}

TEST_CASE("planted structure feasibility") {
  CHECK_THROWS_WITH_AS(gen_planted_structure(4, 10, 0, 0.8, 0.3, 1), doctest::Contains("2y"), std::invalid_argument);
  CHECK_THROWS_AS(gen_planted_structure(4, 10, 0, 0.0, 0.3, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_planted_structure(4, 10, 0, 0.2, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_planted_structure(4, 10, 4, 0.25, 0.36, 1), std::invalid_argument);
  // sqrt(x) (2y - x) / y > 1
  CHECK_THROWS_AS(gen_planted_structure(4, 10, 0, 0.5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("tripartite") {
  const int m = 10;
  const auto full = gen_tripartite(m, 1, 1, 1, 2);
  CHECK(triangles_crossing(full.graph, VertexCut::from_parts(3 * m, full.parts)) == static_cast<Count>(m * m * m));
  const auto none = gen_tripartite(m, 0, 1, 1, 2);
  CHECK(triangles_crossing(none.graph, VertexCut::from_parts(3 * m, none.parts)) == 0);
  for (const auto& part : full.parts) CHECK(edges_within(full.graph, part) == 0);
  const auto g = gen_tripartite(200, 0.5, 0.6, 0.7, 9);
  const double tr = static_cast<double>(triangles_crossing(g.graph, VertexCut::from_parts(600, g.parts)));
  CHECK(std::abs(tr / (200.0 * 200 * 200) - 0.21) <= 0.02);
}

TEST_CASE("min degree graphs") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Graph g = gen_min_degree(12, 8, 0.3, s);
    for (Vertex v = 0; v < 12; ++v) CHECK(g.degree(v) >= 8);
  }
}

TEST_CASE("cut enumeration") {
  CutEnumerator six(6, balanced_alpha(3));
  CHECK(six.count() == 90);
  std::vector<int> a, prev;
  std::uint64_t seen = 0;
  while (six.next(a)) {
    if (seen) CHECK(prev < a);
    prev = a;
    ++seen;
  }
  CHECK(seen == 90);
  CutEnumerator four(4, balanced_alpha(2));
  seen = 0;
  while (four.next(a)) ++seen;
  CHECK(seen == 6);
  CHECK(count_cuts(6, balanced_alpha(3)) == std::optional<std::uint64_t>{90});
  CHECK(count_cuts(100, balanced_alpha(2)) == std::nullopt);
  try {
    CutEnumerator big(20, balanced_alpha(2), 1000);
    FAIL("expected EnumerationBudgetExceeded");
  } catch (const EnumerationBudgetExceeded& e) {
    CHECK(e.count() == std::optional<std::uint64_t>{184756});
  }
}

TEST_CASE("balanced cut sampler is uniform") {
  std::map<std::vector<int>, int> index;
  CutEnumerator en(6, balanced_alpha(3));
  std::vector<int> a;
  while (en.next(a)) index.emplace(a, static_cast<int>(index.size()));
  REQUIRE(index.size() == 90);
  std::vector<double> counts(90, 0);
  const int draws = 100'000;
  for (int i = 0; i < draws; ++i) {
    const auto cut = sample_balanced_cut(6, balanced_alpha(3), derive_seed(77, static_cast<std::uint64_t>(i)));
    counts[static_cast<std::size_t>(index.at(cut.assignment()))] += 1;
  }
  const double expected = draws / 90.0;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(89);
  CHECK(chi2 <= boost::math::quantile(dist, 1 - 1e-3));
}

TEST_CASE("sampled cuts have the requested sizes") {
  const std::vector<double> alpha{0.2, 0.3, 0.5};
  const auto sizes = part_sizes(37, alpha);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto c = sample_balanced_cut(37, alpha, s);
    for (int i = 0; i < 3; ++i) CHECK(static_cast<int>(c.part(i).size()) == sizes[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("GenSpec text round trip") {
  GenSpec s;
  s.family = Family::planted_structure;
  s.t = 6;
  s.m = 300;
  s.s = 2;
  s.x = 0.25;
  s.y = 0.36;
  s.seed = 0xdeadbeefcafef00dULL;
  const GenSpec back = GenSpec::from_text(s.to_text());
  CHECK(back.to_text() == s.to_text());
  CHECK(canonical(generate(back).graph) == canonical(generate(s).graph));
  CHECK_THROWS_AS(GenSpec::from_text("family = nonsense\n"), std::invalid_argument);
}

TEST_CASE("deterministic constructions") {
  GenSpec c;
  c.family = Family::complete;
  c.n = 7;
  CHECK(generate(c).graph.num_edges() == 21);
  c.family = Family::empty;
  CHECK(generate(c).graph.num_edges() == 0);
}

TEST_CASE("rng streams") {
  Xoshiro256 a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  Xoshiro256 c(5);
  c.jump();
  CHECK(c() != Xoshiro256(5)());
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, "gen") == derive_seed(1, "gen"));
  Xoshiro256 r(9);
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(7);
    CHECK(v < 7);
    const double u = r.uniform();
    CHECK((u >= 0 && u < 1));
  }
}
