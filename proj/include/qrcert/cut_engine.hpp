#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrcert/generators.hpp"
#include "qrcert/graph.hpp"

namespace qr {

enum class Property { p1, p2, p3, cut_graph, cut_hypergraph, clique_cut, regularity };
enum class Mode { exhaustive, sampled };

std::string_view property_name(Property p);
Property parse_property(std::string_view name);

struct Witness {
  enum class Kind { none, subset, cut, pair };
  Kind kind = Kind::none;
  std::vector<Vertex> subset;   // subset
  std::vector<int> assignment;  // cut: part index per vertex
  int parts = 0;                // cut: part count
  std::vector<Vertex> a, b;     // pair: A subset of X, B subset of Y

  std::string to_text() const;
  static Witness from_text(std::string_view text, int n);
};

// Largest normalized deviation found by a property checker, with the
// subset or cut that attains it.
struct DeviationReport {
  Property property = Property::p1;
  int n = 0;
  double p = 0.0;
  // Deviations are divided by n^exponent.
  int exponent = 2;
  std::vector<double> alpha;
  int k = 2;
  Mode mode = Mode::sampled;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double max_abs_deviation = 0.0;
  Witness witness;
  // Set when the value is only a lower bound on the true supremum.
  bool estimate = false;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, double>> metrics;
  // Path of the graph/hypergraph the report was computed on (set by the CLI).
  std::string input;
  // regularity only: the pair (X, Y) and epsilon.
  std::vector<Vertex> pair_x, pair_y;
  double epsilon = 0.0;

  // Stable field order; doubles use round-trip formatting.
  std::string to_text() const;
  static DeviationReport from_text(std::string_view text);
  double metric(std::string_view name) const;
};

struct SearchOptions {
  // Random subsets/cuts evaluated in sampled mode.
  std::uint64_t budget = 10'000;
  std::uint64_t seed = 0;
  // In sampled subset mode the first `refine` samples are improved by
  // greedy local search (alternately pushing the deviation up and down).
  std::uint64_t refine = 16;
  // Cut scans are exhaustive iff the ordered-cut count is at most this.
  std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
  // Subset scans are exhaustive iff n <= this.
  int exhaustive_max_n = 20;
};

// |e(U) - p|U|^2/2| / n^2 maximized over subsets U.
DeviationReport check_p1(const Graph& g, double p, const SearchOptions& opts);
// Same, restricted to |U| in {floor(alpha n), ceil(alpha n)}.
DeviationReport check_p2(const Graph& g, double p, double alpha, const SearchOptions& opts);
// |e(G) - pn^2/2| / n^2 and |C4(G) - p^4 n^4/8| / n^4; reports the larger
// and both as metrics "edge_deviation", "c4_deviation".
DeviationReport check_p3(const Graph& g, double p);
// |crossing edges - p n^2 e_2(alpha)| / n^2 maximized over alpha-cuts.
DeviationReport check_cut_graph(const Graph& g, double p, std::span<const double> alpha, const SearchOptions& opts);
// |crossing hyperedges - p n^k e_k(alpha)| / n^k; requires r >= k.
DeviationReport check_cut_hypergraph(const UniformHypergraph& h, double p, std::span<const double> alpha,
                                     const SearchOptions& opts);
// |crossing k-cliques - p^C(k,2) n^k e_k(alpha)| / n^k; requires r >= k >= 2.
DeviationReport check_clique_cut(const Graph& g, double p, int k, std::span<const double> alpha,
                                 const SearchOptions& opts);

// Sampled lower bound on sup |d(X,Y) - d(A,B)| over A in X, B in Y with
// |A| >= eps|X|, |B| >= eps|Y|. Requires |X|, |Y| >= 1/eps.
DeviationReport regularity_deviation(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y,
                                     double epsilon, std::uint64_t trials, std::uint64_t seed);

// Witness evaluators; the checkers compute every deviation through these.
double subset_deviation(const Graph& g, std::span<const Vertex> subset, double p);
double clique_cut_deviation(const Graph& g, const VertexCut& cut, double p, int k);
double hypergraph_cut_deviation(const UniformHypergraph& h, const VertexCut& cut, double p);
double pair_deviation(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y,
                      std::span<const Vertex> a, std::span<const Vertex> b);

// Recomputes the deviation at the report's witness. Graph properties need
// `g`, cut_hypergraph needs `h`.
double reevaluate_witness(const DeviationReport& report, const Graph* g, const UniformHypergraph* h);

}  // namespace qr
