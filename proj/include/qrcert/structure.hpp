#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrcert/combinatorics.hpp"
#include "qrcert/graph.hpp"

namespace qr {

// ---- swap partitions ----

// pi_alpha exchanges U_i (in V_i) with U_j (in V_j), |U_i| = |U_j| = floor(alpha m).
// The three density vectors share the same U sets; alpha = 1 means V_i and
// V_j trade places entirely.
struct SwapOutcome {
  int i = 0, j = 0;
  int k = 3;
  double alpha = 0.0;
  // |U| / m, the swap fraction actually realized.
  double alpha_effective = 0.0;
  std::vector<Vertex> u_i, u_j;
  DensityVectorK d0, d_alpha, d1;
  // d_alpha - (1 - a) d0 - a d1 with a = alpha_effective.
  DensityVectorK d_prime;
  // a(1 - a) times the clique residual for J containing i and j, 0 elsewhere.
  DensityVectorK predicted;
  // Per-part statistics of the unswapped partition.
  PartitionStats stats;

  double max_prediction_error() const;
};

SwapOutcome swap_experiment(const Graph& g, const Partition& parts, int i, int j, double alpha, std::uint64_t seed,
                            int k = 3);

// ((1-a)^2 + a^2) d12 d1k d2k + a(1-a)(x1 d1k^2 + x2 d2k^2)
double predicted_d12k(double x1, double x2, double d12, double d1k, double d2k, double alpha);

// x_i d_ik^2 + x_j d_jk^2 - 2 d_ij d_ik d_jk
double triple_residual(double x_i, double x_j, double d_ij, double d_ik, double d_jk);

// ---- classification ----

struct StructureVerdict {
  enum class Tag { uniform, special_vertex, unstructured };
  Tag tag = Tag::unstructured;
  // uniform: common density
  double p = 0.0;
  // special_vertex: special part s, x = (median background)^2, y = (median to-s)^2
  int s = -1;
  double x = 0.0;
  double y = 0.0;
  // Squared density between two parts other than s (the fit forces z = x).
  double z = 0.0;
  double tol = 0.0;
  // Largest |fit - observed| of the uniform template and of the best
  // special-vertex template, and the part achieving the latter.
  double uniform_residual = 0.0;
  double special_residual = 0.0;
  int best_s = -1;
  // Per-density residuals of the reported template: x_0..x_{t-1} then d_ij for i < j.
  std::vector<double> residuals;

  std::string tag_name() const;
  std::string to_text() const;
};

// Requires t >= 4 and every d_ij > 0.
StructureVerdict classify_structure(const PartitionStats& stats, double tol);

struct ResidualSummary {
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t count = 0;
};

// |triple_residual| over every triple and each of its three choices of the
// distinguished index k.
ResidualSummary residual_matrix(const PartitionStats& stats);

// ---- general k ----

// d^I_{j1 j2} and x^I_j; I is a bit mask disjoint from the j indices.
// Throws std::invalid_argument when a required density is 0.
double transformed_pair(const PartitionStats& stats, std::uint64_t set_i, int j1, int j2);
double transformed_self(const PartitionStats& stats, std::uint64_t set_i, int j);

struct TransformedDensities {
  std::vector<int> js;
  // x^I for each js[a]
  std::vector<double> x;
  // d^I for js[a], js[b], row-major |js| x |js| (diagonal 0)
  std::vector<double> d;
};
TransformedDensities transform_densities(const PartitionStats& stats, std::uint64_t set_i, const std::vector<int>& js);

// triple_residual applied to the transformed values of (j1, j2, j3).
double general_triple_residual(const PartitionStats& stats, std::uint64_t set_i, int j1, int j2, int j3);

// x_j (prod_{a in J'} d_aj)^2 prod_{a<b in J'} d_ab
double clique_extension_term(const PartitionStats& stats, std::uint64_t set_jprime, int j);

// Residual of the k-clique equation for J and the pair {j1, j2} in J:
// sum over j in {j1, j2} of clique_extension_term(J \ {j1, j2}, j) minus
// 2 prod_{a<b in J} d_ab.
double clique_residual(const PartitionStats& stats, std::uint64_t set_j, int j1, int j2);

// prod_{a<b in J} d_ab
double pair_product(const PartitionStats& stats, std::uint64_t set_j);

struct ExcellentAnalysis {
  int t = 0, k = 0;
  double tol = 0.0;
  std::uint64_t tuples = 0;
  std::vector<std::uint64_t> excellent_tuples;  // colex order
  double excellent_fraction = 0.0;
  // Pairs lying in at least (2/3) C(t-2, k-2) excellent tuples.
  std::vector<std::pair<int, int>> excellent_pairs;
  // (I, p_I) for every (k-3)-subset I, colex order.
  std::vector<std::pair<std::uint64_t, double>> p_i;
  // Largest spread max - min of the raw pair densities inside an excellent tuple.
  double max_spread = 0.0;
};

// Requires 3 <= k <= t and every d_ij > 0.
ExcellentAnalysis excellent_analysis(const PartitionStats& stats, int k, double tol);

// ---- clique factors ----

struct CliqueFactorResult {
  enum class Status { found, no_factor, budget_exceeded };
  Status status = Status::no_factor;
  std::vector<std::vector<Vertex>> cliques;
  std::uint64_t nodes = 0;
};

// Exact backtracking search for a perfect K_k-factor. Requires k | n and
// n <= 32.
CliqueFactorResult clique_factor(const Graph& g, int k, std::uint64_t node_budget = 10'000'000);

}  // namespace qr
