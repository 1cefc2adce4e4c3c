#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "qrcert/density_space.hpp"
#include "qrcert/exact_matrix.hpp"
#include "qrcert/generators.hpp"
#include "qrcert/lp.hpp"
#include "qrcert/rng.hpp"

using namespace qr;

namespace {

ExactMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  ExactMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
  return m;
}

ExactMatrix identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

std::uint64_t mask_of(std::initializer_list<int> elems) {
  std::uint64_t m = 0;
  for (int e : elems) m |= std::uint64_t{1} << e;
  return m;
}

}  // namespace

TEST_CASE("inclusion matrix") {
  const auto b422 = inclusion_matrix(4, 2, 2);
  CHECK(b422.rows == 6);
  CHECK(b422.cols == 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(b422.at(i, j) == (i == j ? 1 : 0));
  const auto b532 = inclusion_matrix(5, 3, 2);
  for (std::size_t i = 0; i < b532.rows; ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < b532.cols; ++j) sum += b532.at(i, j);
    CHECK(sum == 3);
  }
  CHECK(rank_exact(inclusion_matrix(6, 3, 2)).rank == 15);
  CHECK(rank_exact(inclusion_matrix(4, 3, 2)).rank == 4);
  CHECK(inclusion_matrix(5, 2, 1).flags == std::vector<std::string>{"k<2"});
  CHECK(inclusion_matrix(5, 3, 2).col_labels.front() == "{0,1}");
  CHECK_THROWS_AS(inclusion_matrix(5, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(inclusion_matrix(3, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(inclusion_matrix(5, 2, 0), std::invalid_argument);
}

TEST_CASE("exact rank") {
  CHECK(rank_exact(identity(6)).rank == 6);
  CHECK(rank_exact(ExactMatrix(4, 5)).rank == 0);
  CHECK(rank_exact(ExactMatrix(0, 0)).rank == 0);
  CHECK(rank_exact(from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}})).rank == 2);
  CHECK(rank_exact(from_rows({{2, -3}, {-4, 6}})).rank == 1);
  // Rank over Q differs from the rank modulo small primes.
  CHECK(rank_exact(from_rows({{3, 0}, {0, 5}})).rank == 2);
  CHECK(rank_modular(from_rows({{3, 0}, {0, 5}}), 5) == 1);
  const auto r = rank_exact(inclusion_matrix(7, 3, 2), 99);
  CHECK(r.method == "bareiss");
  REQUIRE(r.modular.size() == 2);
  for (const auto& [prime, rank] : r.modular) {
    CHECK(is_prime(prime));
    CHECK(prime >= (std::uint64_t{1} << 61));
    CHECK(prime < (std::uint64_t{1} << 62));
    CHECK(rank == 21);
  }
  // Full-rank matrices above the Bareiss limit are certified modularly.
  const auto big = rank_exact(inclusion_matrix(10, 5, 3), 1, 1.0);
  CHECK(big.method == "modular-certificate");
  CHECK(big.rank == 120);
  CHECK(rank_bareiss(inclusion_matrix(10, 5, 3)) == 120);
}

TEST_CASE("rank matches across primes on random matrices") {
  Xoshiro256 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + rng.below(8), cols = 1 + rng.below(8);
    ExactMatrix m(rows, cols);
    for (auto& e : m.entries) e = static_cast<std::int64_t>(rng.below(5)) - 2;
    const std::size_t exact = rank_bareiss(m);
    CHECK(rank_exact(m, static_cast<std::uint64_t>(trial)).rank == exact);
    for (int s = 0; s < 3; ++s) CHECK(rank_modular(m, random_prime_62(static_cast<std::uint64_t>(s))) == exact);
  }
}

TEST_CASE("primes") {
  CHECK(is_prime(2));
  CHECK(is_prime(2305843009213693951ULL));  // 2^61 - 1
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(561));
  CHECK_FALSE(is_prime(2305843009213693953ULL));
  CHECK(random_prime_62(5) == random_prime_62(5));
}

TEST_CASE("Gottlieb sweep at small t") {
  for (int t = 4; t <= 9; ++t)
    for (int k = 2; 2 * k <= t; ++k)
      for (int h = k; h + k <= t; ++h)
        CHECK(rank_exact(inclusion_matrix(t, h, k)).rank == binomial(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k)));
}

TEST_CASE("crossing matrix M") {
  const auto m = crossing_matrix_M(6, 3, 3, kDefaultEnumerationBudget);
  CHECK(m.rows == 90);
  CHECK(m.cols == 20);
  for (std::size_t i = 0; i < m.rows; ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < m.cols; ++j) sum += m.at(i, j);
    CHECK(sum == 8);
  }
  CHECK(m.row_labels.front() == "0,1|2,3|4,5");
  const auto m42 = crossing_matrix_M(4, 2, 2, kDefaultEnumerationBudget);
  for (std::size_t i = 0; i < m42.rows; ++i) {
    std::int64_t sum = 0;
    for (std::size_t j = 0; j < m42.cols; ++j) sum += m42.at(i, j);
    CHECK(sum == 4);
  }
  // K6's triangle lift has a constant density vector, so M d is constant.
  const auto d = clique_density_vector(complete_graph(6), consecutive_equipartition(6, 6), 3);
  const auto md = m.multiply(d.values);
  for (double v : md) CHECK(v == md.front());
  CHECK_THROWS_AS(crossing_matrix_M(7, 3, 3, kDefaultEnumerationBudget), std::invalid_argument);
  CHECK_THROWS_AS(crossing_matrix_M(12, 3, 3, 1000), EnumerationBudgetExceeded);
}

TEST_CASE("crossing submatrix N") {
  const auto n633 = crossing_submatrix_N(6, 3, 3, kDefaultEnumerationBudget);
  CHECK(n633.cols == 4);
  CHECK(rank_exact(n633).rank == 4);
  const auto dedup = dedup_rows(n633);
  CHECK(dedup.rows < n633.rows);
  CHECK(rank_exact(dedup).rank == 4);
  CHECK(dedup.rows == crossing_submatrix_N_distinct(6, 3, 3).rows);
  const auto n844 = crossing_submatrix_N(8, 4, 4, kDefaultEnumerationBudget);
  CHECK(rank_exact(n844).rank == 15);
  CHECK(rank_exact(dedup_rows(n844)).rank == 15);
  CHECK(rank_exact(crossing_submatrix_N_distinct(8, 4, 4)).rank == 15);
  // Rows of N have 0 and 1 in different parts; columns contain both.
  for (const auto& label : n633.col_labels) CHECK(label.rfind("{0,1", 0) == 0);
}

TEST_CASE("N full column rank away from singleton cuts") {
  for (int k : {3, 4})
    for (int t = k; t <= 12; ++t)
      for (int r = k; r < t; ++r) {
        if (t % r) continue;
        CAPTURE(t);
        CAPTURE(r);
        CAPTURE(k);
        CHECK(rank_exact(crossing_submatrix_N_distinct(t, r, k)).rank ==
              binomial(static_cast<std::uint64_t>(t - 2), static_cast<std::uint64_t>(k - 2)));
      }
}

TEST_CASE("N with singleton parts has a single distinct row") {
  // r = t puts every index in its own part, so every column crosses every row.
  for (int t = 4; t <= 8; ++t) {
    const auto n = crossing_submatrix_N_distinct(t, t, 3);
    CHECK(n.rows == 1);
    CHECK(rank_exact(n).rank == 1);
  }
}

TEST_CASE("triplet export") {
  std::ostringstream ss;
  write_triplets(ss, inclusion_matrix(4, 2, 2));
  const std::string text = ss.str();
  CHECK(text.rfind("# 6 6 6\n", 0) == 0);
  CHECK(text.find("{0,1} {0,1} 1\n") != std::string::npos);
}

TEST_CASE("u vectors") {
  const auto u = u_vector(4, 3, 0.5, mask_of({0, 1}));
  CHECK(u.at(mask_of({0, 1, 2})) == doctest::Approx(2.0 / 3));
  CHECK(u.at(mask_of({0, 1, 3})) == doctest::Approx(2.0 / 3));
  CHECK(u.at(mask_of({0, 2, 3})) == doctest::Approx(1.0 / 3));
  CHECK(u.at(mask_of({1, 2, 3})) == doctest::Approx(1.0 / 3));
  for (double v : u_vector(6, 3, 0.0, mask_of({0, 2, 4})).values) CHECK(v == 0.0);
  CHECK_THROWS_AS(u_vector(6, 3, 0.5, mask_of({0, 1})), std::invalid_argument);
  CHECK_THROWS_AS(u_vector(5, 3, 0.5, mask_of({0, 1})), std::invalid_argument);

  // The average over all I is the constant p vector.
  const auto subsets = subsets_colex(6, 3);
  std::vector<double> avg(binomial(6, 3), 0.0);
  for (auto i : subsets) {
    const auto v = u_vector(6, 3, 0.4, i);
    for (std::size_t e = 0; e < avg.size(); ++e) avg[e] += v.values[e] / static_cast<double>(subsets.size());
  }
  for (double v : avg) CHECK(v == doctest::Approx(0.4));
}

TEST_CASE("W parametrization") {
  // generator_coefficients reproduces w_point from the u-vectors.
  Xoshiro256 rng(4);
  for (int t : {4, 6, 8}) {
    std::vector<double> w(static_cast<std::size_t>(t));
    double sum = 0;
    for (auto& v : w) sum += v = rng.uniform();
    for (auto& v : w) v *= (t / 2.0) / sum;
    const auto c = generator_coefficients(t, w);
    double csum = 0;
    for (double v : c) csum += v;
    CHECK(csum == doctest::Approx(1.0));
    const auto target = w_point(t, 3, 0.3, w);
    std::vector<double> combo(target.size(), 0.0);
    const auto gens = subsets_colex(t, t / 2);
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const auto u = u_vector(t, 3, 0.3, gens[g]);
      for (std::size_t e = 0; e < combo.size(); ++e) combo[e] += c[g] * u.values[e];
    }
    for (std::size_t e = 0; e < combo.size(); ++e) CHECK(combo[e] == doctest::Approx(target.values[e]).epsilon(1e-12));
  }
}

TEST_CASE("distance to W") {
  const auto u = u_vector(8, 3, 0.3, mask_of({0, 3, 5, 6}));
  const auto du = distance_to_W(u, 0.3, true);
  CHECK(du.l2 <= 1e-10);
  CHECK(du.linf <= 1e-10);
  REQUIRE(du.linf_exact);
  CHECK(*du.linf_exact <= 1e-9);

  DensityVectorK constant(8, 3);
  std::fill(constant.values.begin(), constant.values.end(), 0.3);
  CHECK(distance_to_W(constant, 0.3).linf <= 1e-10);

  // Off-family vector: the exact max-norm distance never exceeds the least-squares one.
  Xoshiro256 rng(6);
  DensityVectorK noisy(6, 3);
  for (auto& v : noisy.values) v = rng.uniform();
  const auto dn = distance_to_W(noisy, 0.5, true);
  REQUIRE(dn.linf_exact);
  CHECK(*dn.linf_exact <= dn.linf + 1e-12);
  CHECK(*dn.linf_exact > 0.01);
  CHECK(dn.l2 >= dn.linf - 1e-12);
  CHECK_THROWS_AS(distance_to_W(DensityVectorK(7, 3), 0.5), std::invalid_argument);
}

TEST_CASE("distance to W of random graphs") {
  const Graph g = gen_gnp(400, 0.5, 3);
  const auto d = clique_density_vector(g, consecutive_equipartition(400, 8), 3);
  const double ph = static_cast<double>(clique_hypergraph(g, 3).size()) / static_cast<double>(binomial(400, 3));
  CHECK(distance_to_W(d, ph).linf <= 0.05);
}

TEST_CASE("linear programs") {
  // min -x - y, x + y + s = 1, x - y + s2 = 0.5
  const auto r = solve_lp({-1, -1, 0, 0}, {{1, 1, 1, 0}, {1, -1, 0, 1}}, {1, 0.5});
  REQUIRE(r.status == LpResult::Status::optimal);
  CHECK(r.value == doctest::Approx(-1));
  const auto inf = solve_lp({1}, {{1}}, {-1});
  CHECK(inf.status == LpResult::Status::infeasible);
  const auto unb = solve_lp({-1, 0}, {{1, -1}}, {0});
  CHECK(unb.status == LpResult::Status::unbounded);
}
