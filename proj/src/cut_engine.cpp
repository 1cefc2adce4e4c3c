#include "qrcert/cut_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qrcert/parallel.hpp"
#include "qrcert/rng.hpp"

namespace qr {

namespace {

double normalized_gap(double count, double target, int n, int exponent) {
  return std::abs(count - target) / std::pow(static_cast<double>(n), exponent);
}

double subset_gap(Count edges, std::size_t size, double p, int n) {
  const auto s = static_cast<double>(size);
  return normalized_gap(static_cast<double>(edges), p * s * s / 2.0, n, 2);
}

double cut_target(int n, int k, std::span<const double> alpha, double density) {
  return density * std::pow(static_cast<double>(n), k) * elementary_symmetric(alpha, k);
}

struct Scan {
  double best = -1.0;
  std::size_t index = 0;
  std::uint64_t evaluated = 0;
};

// Max with first-index tie breaking over a block of per-item results.
void absorb(Scan& scan, std::span<const double> values, std::size_t offset) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > scan.best) {
      scan.best = values[i];
      scan.index = offset + i;
    }
  }
  scan.evaluated += values.size();
}

Witness subset_witness(std::vector<Vertex> subset) {
  Witness w;
  w.kind = Witness::Kind::subset;
  w.subset = std::move(subset);
  return w;
}

Witness cut_witness(const VertexCut& cut) {
  Witness w;
  w.kind = Witness::Kind::cut;
  w.assignment = cut.assignment();
  w.parts = cut.r();
  return w;
}

// ---- subset search ----

std::vector<Vertex> random_subset(int n, Xoshiro256& rng) {
  std::vector<Vertex> out;
  for (int v = 0; v < n; ++v)
    if (rng() >> 63) out.push_back(v);
  return out;
}

std::vector<Vertex> random_subset_of_size(int n, int size, Xoshiro256& rng) {
  std::vector<Vertex> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < size; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(size));
  std::sort(all.begin(), all.end());
  return all;
}

// Tracks e(U) and |N(v) n U| for local moves.
class SubsetState {
 public:
  SubsetState(const Graph& g, std::span<const Vertex> initial)
      : g_(g), in_(static_cast<std::size_t>(g.n()), 0), inside_(static_cast<std::size_t>(g.n()), 0) {
    for (Vertex v : initial) add(v);
  }

  void add(Vertex v) {
    edges_ += static_cast<Count>(inside_[static_cast<std::size_t>(v)]);
    in_[static_cast<std::size_t>(v)] = 1;
    ++size_;
    g_.neighbors(v).for_each([&](Vertex w) { ++inside_[static_cast<std::size_t>(w)]; });
  }
  void remove(Vertex v) {
    edges_ -= static_cast<Count>(inside_[static_cast<std::size_t>(v)]);
    in_[static_cast<std::size_t>(v)] = 0;
    --size_;
    g_.neighbors(v).for_each([&](Vertex w) { --inside_[static_cast<std::size_t>(w)]; });
  }

  bool contains(Vertex v) const { return in_[static_cast<std::size_t>(v)] != 0; }
  int inside(Vertex v) const { return inside_[static_cast<std::size_t>(v)]; }
  Count edges() const { return edges_; }
  long long size() const { return size_; }
  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    for (int v = 0; v < g_.n(); ++v)
      if (in_[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
  }

 private:
  const Graph& g_;
  std::vector<char> in_;
  std::vector<int> inside_;
  Count edges_ = 0;
  long long size_ = 0;
};

// Greedy ascent of sign * (e(U) - p|U|^2/2) over single-vertex flips.
std::vector<Vertex> refine_free(const Graph& g, std::vector<Vertex> start, double p, double sign) {
  SubsetState st(g, start);
  const int n = g.n();
  for (int step = 0; step < 4 * n; ++step) {
    double best_gain = 1e-9;
    Vertex best = -1;
    const auto s = static_cast<double>(st.size());
    for (Vertex v = 0; v < n; ++v) {
      const double gain = st.contains(v) ? -st.inside(v) + p * (2 * s - 1) / 2 : st.inside(v) - p * (2 * s + 1) / 2;
      if (sign * gain > best_gain) {
        best_gain = sign * gain;
        best = v;
      }
    }
    if (best < 0) break;
    if (st.contains(best))
      st.remove(best);
    else
      st.add(best);
  }
  return st.members();
}

// Greedy ascent of sign * e(U) over swaps that keep |U| fixed.
std::vector<Vertex> refine_fixed(const Graph& g, std::vector<Vertex> start, double sign) {
  SubsetState st(g, start);
  const int n = g.n();
  for (int step = 0; step < 4 * n; ++step) {
    Vertex in_best = -1, out_best = -1;
    double in_score = -1e18, out_score = 1e18;
    for (Vertex v = 0; v < n; ++v) {
      const double c = sign * st.inside(v);
      if (st.contains(v)) {
        if (c < out_score) {
          out_score = c;
          out_best = v;
        }
      } else if (c > in_score) {
        in_score = c;
        in_best = v;
      }
    }
    if (in_best < 0 || out_best < 0) break;
    const double gain = in_score - out_score - sign * (g.has_edge(in_best, out_best) ? 1.0 : 0.0);
    if (gain <= 1e-9) break;
    st.remove(out_best);
    st.add(in_best);
  }
  return st.members();
}

template <class Sample>
DeviationReport scan_subsets(const Graph& g, double p, const SearchOptions& opts, Sample sample) {
  std::vector<double> devs(opts.budget);
  parallel_for(opts.budget, [&](std::size_t i) { devs[i] = subset_deviation(g, sample(i), p); });
  Scan scan;
  absorb(scan, devs, 0);
  DeviationReport r;
  r.mode = Mode::sampled;
  r.samples = scan.evaluated;
  r.estimate = true;
  if (scan.evaluated > 0) {
    r.max_abs_deviation = scan.best;
    r.witness = subset_witness(sample(scan.index));
  }
  return r;
}

std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(g.n()), 0);
  for (const auto& [u, v] : g.edges()) {
    masks[static_cast<std::size_t>(u)] |= 1U << v;
    masks[static_cast<std::size_t>(v)] |= 1U << u;
  }
  return masks;
}

std::vector<Vertex> mask_vertices(std::uint32_t mask) {
  std::vector<Vertex> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// ---- cut scans ----

template <class Evaluate>
DeviationReport scan_cuts(int n, std::span<const double> alpha, const SearchOptions& opts, Evaluate evaluate) {
  DeviationReport r;
  r.n = n;
  r.alpha.assign(alpha.begin(), alpha.end());
  const auto total = count_cuts(n, alpha);
  Scan scan;
  if (total && *total <= opts.enumeration_budget) {
    r.mode = Mode::exhaustive;
    CutEnumerator en(n, alpha, opts.enumeration_budget);
    constexpr std::size_t kBlock = 4096;
    std::vector<std::vector<int>> block;
    std::vector<int> a;
    std::vector<double> devs;
    std::vector<int> best_assignment;
    const int parts = static_cast<int>(alpha.size());
    bool more = true;
    while (more) {
      block.clear();
      while (block.size() < kBlock && (more = en.next(a))) block.push_back(a);
      devs.assign(block.size(), 0.0);
      parallel_for(block.size(), [&](std::size_t i) {
        devs[i] = evaluate(VertexCut::from_assignment(block[i], parts, r.alpha));
      });
      const std::size_t offset = scan.evaluated;
      const double before = scan.best;
      absorb(scan, devs, offset);
      if (scan.best > before) best_assignment = block[scan.index - offset];
    }
    r.samples = scan.evaluated;
    r.max_abs_deviation = std::max(0.0, scan.best);
    if (!best_assignment.empty()) r.witness = cut_witness(VertexCut::from_assignment(best_assignment, parts, r.alpha));
  } else {
    r.mode = Mode::sampled;
    r.estimate = true;
    r.flags.push_back("enumeration_over_budget");
    std::vector<double> devs(opts.budget);
    parallel_for(opts.budget, [&](std::size_t i) {
      devs[i] = evaluate(sample_balanced_cut(n, alpha, derive_seed(opts.seed, i)));
    });
    absorb(scan, devs, 0);
    r.samples = scan.evaluated;
    if (scan.evaluated > 0) {
      r.max_abs_deviation = scan.best;
      r.witness = cut_witness(sample_balanced_cut(n, alpha, derive_seed(opts.seed, scan.index)));
    }
  }
  r.seed = opts.seed;
  return r;
}

void require_probability(double p) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("target density p must lie in [0,1]");
}

}  // namespace

// ---- names ----

std::string_view property_name(Property p) {
  switch (p) {
    case Property::p1: return "p1";
    case Property::p2: return "p2";
    case Property::p3: return "p3";
    case Property::cut_graph: return "cut_graph";
    case Property::cut_hypergraph: return "cut_hypergraph";
    case Property::clique_cut: return "clique_cut";
    case Property::regularity: return "regularity";
  }
  return "?";
}

Property parse_property(std::string_view name) {
  for (Property p : {Property::p1, Property::p2, Property::p3, Property::cut_graph, Property::cut_hypergraph,
                     Property::clique_cut, Property::regularity})
    if (property_name(p) == name) return p;
  throw std::invalid_argument("unknown property '" + std::string(name) + "'");
}

// ---- evaluators ----

double subset_deviation(const Graph& g, std::span<const Vertex> subset, double p) {
  return subset_gap(edges_within(g, subset), subset.size(), p, g.n());
}

double clique_cut_deviation(const Graph& g, const VertexCut& cut, double p, int k) {
  const double density = std::pow(p, static_cast<double>(k * (k - 1) / 2));
  const auto count = static_cast<double>(cliques_crossing(g, cut, k));
  return normalized_gap(count, cut_target(g.n(), k, cut.alpha(), density), g.n(), k);
}

double hypergraph_cut_deviation(const UniformHypergraph& h, const VertexCut& cut, double p) {
  const auto count = static_cast<double>(hyperedges_crossing(h, cut));
  return normalized_gap(count, cut_target(h.n(), h.k(), cut.alpha(), p), h.n(), h.k());
}

double pair_deviation(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y,
                      std::span<const Vertex> a, std::span<const Vertex> b) {
  return std::abs(density_between(g, x, y) - density_between(g, a, b));
}

// ---- checkers ----

DeviationReport check_p1(const Graph& g, double p, const SearchOptions& opts) {
  require_probability(p);
  const int n = g.n();
  DeviationReport r;
  if (n <= opts.exhaustive_max_n && n <= 30) {
    // Gray-code walk over all 2^n subsets with incremental e(U).
    const auto nb = neighbor_masks(g);
    std::uint32_t mask = 0;
    Count edges = 0;
    double best = subset_gap(0, 0, p, n);
    std::uint32_t best_mask = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t i = 1; i < total; ++i) {
      const int v = std::countr_zero(i);
      const std::uint32_t bit = 1U << v;
      const auto inside = static_cast<Count>(std::popcount(nb[static_cast<std::size_t>(v)] & mask));
      if (mask & bit) {
        edges -= inside;
        mask &= ~bit;
      } else {
        edges += inside;
        mask |= bit;
      }
      const double dev = subset_gap(edges, static_cast<std::size_t>(std::popcount(mask)), p, n);
      if (dev > best) {
        best = dev;
        best_mask = mask;
      }
    }
    r.mode = Mode::exhaustive;
    r.samples = total;
    r.max_abs_deviation = best;
    r.witness = subset_witness(mask_vertices(best_mask));
  } else {
    r = scan_subsets(g, p, opts, [&](std::size_t i) {
      Xoshiro256 rng(derive_seed(opts.seed, i));
      auto u = random_subset(n, rng);
      if (i < opts.refine) u = refine_free(g, std::move(u), p, i % 2 == 0 ? 1.0 : -1.0);
      return u;
    });
  }
  r.property = Property::p1;
  r.n = n;
  r.p = p;
  r.exponent = 2;
  r.seed = opts.seed;
  return r;
}

DeviationReport check_p2(const Graph& g, double p, double alpha, const SearchOptions& opts) {
  require_probability(p);
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("p2 needs 0 < alpha < 1");
  const int n = g.n();
  if (alpha * n < 2) throw std::invalid_argument("p2 needs alpha * n >= 2");
  const int lo = static_cast<int>(std::floor(alpha * n + 1e-9));
  const int hi = static_cast<int>(std::ceil(alpha * n - 1e-9));
  DeviationReport r;
  if (n <= opts.exhaustive_max_n && n <= 30) {
    const auto nb = neighbor_masks(g);
    double best = -1;
    std::uint32_t best_mask = 0;
    std::uint64_t count = 0;
    for (int size = lo; size <= hi; ++size) {
      for (std::uint64_t mask : subsets_colex(n, size)) {
        const auto m32 = static_cast<std::uint32_t>(mask);
        Count twice = 0;
        for (std::uint32_t rest = m32; rest; rest &= rest - 1)
          twice += static_cast<Count>(std::popcount(nb[static_cast<std::size_t>(std::countr_zero(rest))] & m32));
        const double dev = subset_gap(twice / 2, static_cast<std::size_t>(size), p, n);
        ++count;
        if (dev > best) {
          best = dev;
          best_mask = m32;
        }
      }
    }
    r.mode = Mode::exhaustive;
    r.samples = count;
    r.max_abs_deviation = best;
    r.witness = subset_witness(mask_vertices(best_mask));
  } else {
    r = scan_subsets(g, p, opts, [&](std::size_t i) {
      Xoshiro256 rng(derive_seed(opts.seed, i));
      auto u = random_subset_of_size(n, i % 2 == 0 ? lo : hi, rng);
      if (i < opts.refine) u = refine_fixed(g, std::move(u), i % 2 == 0 ? 1.0 : -1.0);
      return u;
    });
  }
  r.property = Property::p2;
  r.n = n;
  r.p = p;
  r.exponent = 2;
  r.alpha = {alpha};
  r.seed = opts.seed;
  return r;
}

DeviationReport check_p3(const Graph& g, double p) {
  require_probability(p);
  const int n = g.n();
  const double nn = static_cast<double>(n);
  const double edge_dev = normalized_gap(static_cast<double>(g.num_edges()), p * nn * nn / 2.0, n, 2);
  const double c4_dev = normalized_gap(static_cast<double>(count_c4(g)), std::pow(p, 4) * std::pow(nn, 4) / 8.0, n, 4);
  DeviationReport r;
  r.property = Property::p3;
  r.n = n;
  r.p = p;
  r.exponent = 4;
  r.mode = Mode::exhaustive;
  r.samples = 1;
  r.max_abs_deviation = std::max(edge_dev, c4_dev);
  r.metrics = {{"edge_deviation", edge_dev}, {"c4_deviation", c4_dev}};
  return r;
}

DeviationReport check_clique_cut(const Graph& g, double p, int k, std::span<const double> alpha,
                                 const SearchOptions& opts) {
  require_probability(p);
  const int r_parts = static_cast<int>(alpha.size());
  if (k < 2) throw std::invalid_argument("clique cut property needs k >= 2");
  if (r_parts < k) throw std::invalid_argument("clique cut property needs r >= k");
  DeviationReport r = scan_cuts(g.n(), alpha, opts, [&](const VertexCut& cut) { return clique_cut_deviation(g, cut, p, k); });
  r.property = Property::clique_cut;
  r.p = p;
  r.k = k;
  r.exponent = k;
  return r;
}

DeviationReport check_cut_graph(const Graph& g, double p, std::span<const double> alpha, const SearchOptions& opts) {
  if (alpha.size() < 2) throw std::invalid_argument("cut property needs r >= 2");
  DeviationReport r = check_clique_cut(g, p, 2, alpha, opts);
  r.property = Property::cut_graph;
  return r;
}

DeviationReport check_cut_hypergraph(const UniformHypergraph& h, double p, std::span<const double> alpha,
                                     const SearchOptions& opts) {
  require_probability(p);
  if (static_cast<int>(alpha.size()) < h.k()) throw std::invalid_argument("hypergraph cut property needs r >= k");
  DeviationReport r = scan_cuts(h.n(), alpha, opts, [&](const VertexCut& cut) { return hypergraph_cut_deviation(h, cut, p); });
  r.property = Property::cut_hypergraph;
  r.p = p;
  r.k = h.k();
  r.exponent = h.k();
  return r;
}

DeviationReport regularity_deviation(const Graph& g, std::span<const Vertex> x, std::span<const Vertex> y,
                                     double epsilon, std::uint64_t trials, std::uint64_t seed) {
  if (!(epsilon > 0 && epsilon <= 1)) throw std::invalid_argument("epsilon must lie in (0,1]");
  if (static_cast<double>(x.size()) < 1 / epsilon || static_cast<double>(y.size()) < 1 / epsilon)
    throw std::invalid_argument("regularity check needs |X|, |Y| >= 1/epsilon");
  const Bitset xb = Bitset::from_vertices(static_cast<std::size_t>(g.n()), x);
  const Bitset yb = Bitset::from_vertices(static_cast<std::size_t>(g.n()), y);
  if (xb.intersects(yb)) throw std::invalid_argument("regularity pair must be disjoint");

  const auto min_size = [&](std::size_t total, double frac) {
    return std::min(total, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(total) - 1e-9)));
  };
  auto random_part = [&](std::span<const Vertex> from, std::size_t lo, Xoshiro256& rng) {
    const std::size_t size = lo + rng.below(from.size() - lo + 1);
    std::vector<Vertex> pool(from.begin(), from.end());
    for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    pool.resize(size);
    std::sort(pool.begin(), pool.end());
    return pool;
  };
  // Even trials draw both sides at random; odd trials draw one side at
  // random and take the other side's highest- or lowest-degree vertices
  // into it, which exposes density concentrated on part of a side.
  auto sample = [&](std::size_t i) {
    Xoshiro256 rng(derive_seed(seed, i));
    const bool flip = (i / 4) % 2 == 1;
    std::span<const Vertex> s1 = flip ? y : x, s2 = flip ? x : y;
    std::vector<Vertex> other = random_part(s2, min_size(s2.size(), epsilon), rng);
    std::vector<Vertex> chosen;
    if (i % 2 == 0) {
      chosen = random_part(s1, min_size(s1.size(), epsilon), rng);
    } else {
      const Bitset ob = Bitset::from_vertices(static_cast<std::size_t>(g.n()), other);
      std::vector<std::pair<std::size_t, Vertex>> ranked;
      for (Vertex v : s1) ranked.emplace_back(intersect_count(g.neighbors(v), ob), v);
      const bool top = (i / 2) % 2 == 0;
      std::stable_sort(ranked.begin(), ranked.end(),
                       [&](const auto& a, const auto& b) { return top ? a.first > b.first : a.first < b.first; });
      const std::size_t lo = min_size(s1.size(), std::max(epsilon, 0.5));
      const std::size_t size = lo + rng.below(s1.size() - lo + 1);
      for (std::size_t j = 0; j < size; ++j) chosen.push_back(ranked[j].second);
      std::sort(chosen.begin(), chosen.end());
    }
    return flip ? std::make_pair(std::move(other), std::move(chosen)) : std::make_pair(std::move(chosen), std::move(other));
  };

  std::vector<double> devs(trials);
  parallel_for(trials, [&](std::size_t i) {
    const auto [a, b] = sample(i);
    devs[i] = pair_deviation(g, x, y, a, b);
  });
  Scan scan;
  absorb(scan, devs, 0);

  DeviationReport r;
  r.property = Property::regularity;
  r.n = g.n();
  r.exponent = 0;
  r.mode = Mode::sampled;
  r.estimate = true;
  r.samples = trials;
  r.seed = seed;
  r.epsilon = epsilon;
  r.pair_x.assign(x.begin(), x.end());
  r.pair_y.assign(y.begin(), y.end());
  r.p = density_between(g, x, y);
  r.metrics = {{"pair_density", r.p}};
  r.flags.push_back("lower_bound_estimate");
  if (trials > 0) {
    r.max_abs_deviation = scan.best;
    auto [a, b] = sample(scan.index);
    r.witness.kind = Witness::Kind::pair;
    r.witness.a = std::move(a);
    r.witness.b = std::move(b);
  }
  return r;
}

double reevaluate_witness(const DeviationReport& report, const Graph* g, const UniformHypergraph* h) {
  auto need_graph = [&] {
    if (!g) throw std::invalid_argument("report needs a graph to re-evaluate");
    return g;
  };
  switch (report.property) {
    case Property::p1:
    case Property::p2:
      if (report.witness.kind != Witness::Kind::subset) throw std::invalid_argument("subset report without subset witness");
      return subset_deviation(*need_graph(), report.witness.subset, report.p);
    case Property::p3: {
      const DeviationReport again = check_p3(*need_graph(), report.p);
      return again.max_abs_deviation;
    }
    case Property::cut_graph:
    case Property::clique_cut: {
      if (report.witness.kind != Witness::Kind::cut) throw std::invalid_argument("cut report without cut witness");
      const VertexCut cut = VertexCut::from_assignment(report.witness.assignment, report.witness.parts, report.alpha);
      return clique_cut_deviation(*need_graph(), cut, report.p, report.k);
    }
    case Property::cut_hypergraph: {
      if (!h) throw std::invalid_argument("report needs a hypergraph to re-evaluate");
      if (report.witness.kind != Witness::Kind::cut) throw std::invalid_argument("cut report without cut witness");
      const VertexCut cut = VertexCut::from_assignment(report.witness.assignment, report.witness.parts, report.alpha);
      return hypergraph_cut_deviation(*h, cut, report.p);
    }
    case Property::regularity:
      if (report.witness.kind != Witness::Kind::pair) throw std::invalid_argument("regularity report without pair witness");
      return pair_deviation(*need_graph(), report.pair_x, report.pair_y, report.witness.a, report.witness.b);
  }
  throw std::logic_error("unhandled property");
}

}  // namespace qr
