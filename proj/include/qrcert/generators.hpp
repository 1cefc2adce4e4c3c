#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrcert/graph.hpp"

namespace qr {

enum class Family { gnp, half_split, planted_structure, tripartite, complete, empty };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

// Parameters for one generated graph. Which fields matter depends on the
// family:
//   gnp          n, p
//   half_split   n (even), p (2p <= 1)
//   planted      t, m, s, x, y   (0 < x <= min(2y, 1), y <= 1, sqrt(x)(2y-x)/y <= 1)
//   tripartite   m, d12, d13, d23
//   complete     n
//   empty        n
struct GenSpec {
  Family family = Family::gnp;
  int n = 0;
  double p = 0.5;
  int t = 0;
  int m = 0;
  int s = 0;
  double x = 0.0;
  double y = 0.0;
  double d12 = 0.0;
  double d13 = 0.0;
  double d23 = 0.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  // Flat "key = value" lines; from_text(to_text()) reproduces the spec.
  std::string to_text() const;
  static GenSpec from_text(std::string_view text);
};

struct GeneratedGraph {
  Graph graph;
  // Block structure the graph was sampled from (one part for gnp, complete, empty).
  Partition parts;
};

GeneratedGraph generate(const GenSpec& spec);

// Independent edges; rows are sampled from per-vertex derived streams, so
// the output depends only on the arguments.
Graph gen_gnp(int n, double p, std::uint64_t seed);

// G(n/2, 2p) on vertices [0, n/2), independent set on [n/2, n), and
// cross pairs present with probability p.
Graph gen_half_split(int n, double p, std::uint64_t seed);

// Block random graph: part i holds sizes[i] consecutive vertices, pairs
// inside part i are edges with probability density[i][i], pairs across
// parts i != j with probability density[i][j]. density is t*t row-major.
Graph gen_block_model(std::span<const int> sizes, std::span<const double> density, std::uint64_t seed);

// Target (x_i, d_ij) of the planted special-part structure: background
// sqrt(x), pairs touching part s sqrt(y), inside part s sqrt(x)(2y-x)/y.
PartitionStats planted_targets(int t, int part_size, int s, double x, double y);

GeneratedGraph gen_planted_structure(int t, int m, int s, double x, double y, std::uint64_t seed);

GeneratedGraph gen_tripartite(int m, double d12, double d13, double d23, std::uint64_t seed);

Graph complete_graph(int n);

// G(n, p) followed by adding uniformly random non-edges at every vertex
// (in index order) until each degree is at least min_degree.
Graph gen_min_degree(int n, int min_degree, double p, std::uint64_t seed);

// Uniformly random ordered cut with sizes part_sizes(n, alpha).
VertexCut sample_balanced_cut(int n, std::span<const double> alpha, std::uint64_t seed);

// Each vertex independently with probability alpha.
std::vector<Vertex> sample_bernoulli_subset(int n, double alpha, std::uint64_t seed);

class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  EnumerationBudgetExceeded(std::optional<std::uint64_t> count, std::uint64_t budget);
  // Number of cuts requested (nullopt when it does not fit in 64 bits).
  std::optional<std::uint64_t> count() const { return count_; }

 private:
  std::optional<std::uint64_t> count_;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// All ordered cuts with sizes part_sizes(n, alpha), in lexicographic order
// of the assignment vector.
class CutEnumerator {
 public:
  CutEnumerator(int n, std::span<const double> alpha, std::uint64_t budget = kDefaultEnumerationBudget);

  std::uint64_t count() const { return count_; }
  // Next assignment vector, or false when exhausted.
  bool next(std::vector<int>& assignment);
  std::optional<VertexCut> next_cut();

 private:
  std::vector<int> current_;
  std::vector<double> alpha_;
  int r_ = 0;
  std::uint64_t count_ = 0;
  bool started_ = false;
  bool done_ = false;
};

// Number of ordered cuts, or nullopt past 2^64.
std::optional<std::uint64_t> count_cuts(int n, std::span<const double> alpha);

}  // namespace qr
