#include "qrcert/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qrcert/kv.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/rng.hpp"

namespace qr {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

void require_planted_feasible(int t, int m, int s, double x, double y) {
  if (t < 2) throw std::invalid_argument("planted structure needs t >= 2");
  if (m < 1) throw std::invalid_argument("planted structure needs part size m >= 1");
  if (s < 0 || s >= t) throw std::invalid_argument("special part s must lie in [0, t)");
  if (!(y > 0.0)) throw std::invalid_argument("planted structure needs y > 0");
  if (!(y <= 1.0)) throw std::invalid_argument("planted structure needs y <= 1");
  if (!(x > 0.0)) throw std::invalid_argument("planted structure needs x > 0");
  if (!(x <= 2.0 * y)) throw std::invalid_argument("planted structure needs x <= 2y");
  if (!(x <= 1.0)) throw std::invalid_argument("planted structure needs x <= 1");
  if (!(std::sqrt(x) * (2.0 * y - x) / y <= 1.0))
    throw std::invalid_argument("planted structure needs sqrt(x)(2y-x)/y <= 1");
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::gnp: return "gnp";
    case Family::half_split: return "half_split";
    case Family::planted_structure: return "planted_structure";
    case Family::tripartite: return "tripartite";
    case Family::complete: return "complete";
    case Family::empty: return "empty";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gnp, Family::half_split, Family::planted_structure, Family::tripartite, Family::complete,
                   Family::empty})
    if (family_name(f) == name) return f;
  throw std::invalid_argument("unknown graph family '" + std::string(name) + "'");
}

void GenSpec::validate() const {
  switch (family) {
    case Family::gnp:
      if (n < 1) throw std::invalid_argument("gnp needs n >= 1");
      require_probability(p, "p");
      break;
    case Family::half_split:
      if (n < 2 || n % 2 != 0) throw std::invalid_argument("half_split needs an even n >= 2");
      require_probability(p, "p");
      if (2.0 * p > 1.0) throw std::invalid_argument("half_split needs 2p <= 1");
      break;
    case Family::planted_structure:
      require_planted_feasible(t, m, s, x, y);
      break;
    case Family::tripartite:
      if (m < 1) throw std::invalid_argument("tripartite needs m >= 1");
      require_probability(d12, "d12");
      require_probability(d13, "d13");
      require_probability(d23, "d23");
      break;
    case Family::complete:
    case Family::empty:
      if (n < 0) throw std::invalid_argument("n must be non-negative");
      break;
  }
}

std::string GenSpec::to_text() const {
  KeyValues kv;
  kv.set("family", std::string(family_name(family)));
  kv.set("n", std::to_string(n));
  kv.set("p", format_double(p));
  kv.set("t", std::to_string(t));
  kv.set("m", std::to_string(m));
  kv.set("s", std::to_string(s));
  kv.set("x", format_double(x));
  kv.set("y", format_double(y));
  kv.set("d12", format_double(d12));
  kv.set("d13", format_double(d13));
  kv.set("d23", format_double(d23));
  kv.set("seed", std::to_string(seed));
  return kv.to_text();
}

GenSpec GenSpec::from_text(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  GenSpec spec;
  spec.family = parse_family(kv.get("family"));
  auto int_or = [&](const char* key, int fallback) {
    return kv.has(key) ? static_cast<int>(kv.get_int(key)) : fallback;
  };
  auto double_or = [&](const char* key, double fallback) { return kv.has(key) ? kv.get_double(key) : fallback; };
  spec.n = int_or("n", spec.n);
  spec.p = double_or("p", spec.p);
  spec.t = int_or("t", spec.t);
  spec.m = int_or("m", spec.m);
  spec.s = int_or("s", spec.s);
  spec.x = double_or("x", spec.x);
  spec.y = double_or("y", spec.y);
  spec.d12 = double_or("d12", spec.d12);
  spec.d13 = double_or("d13", spec.d13);
  spec.d23 = double_or("d23", spec.d23);
  spec.seed = kv.has("seed") ? kv.get_u64("seed") : 0;
  return spec;
}

Graph gen_block_model(std::span<const int> sizes, std::span<const double> density, std::uint64_t seed) {
  const std::size_t t = sizes.size();
  if (density.size() != t * t) throw std::invalid_argument("block density matrix must be t x t");
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      require_probability(density[i * t + j], "block density");
      if (density[i * t + j] != density[j * t + i]) throw std::invalid_argument("block density matrix not symmetric");
    }
  std::vector<int> block_of;
  for (std::size_t b = 0; b < t; ++b) {
    if (sizes[b] < 0) throw std::invalid_argument("negative block size");
    block_of.insert(block_of.end(), static_cast<std::size_t>(sizes[b]), static_cast<int>(b));
  }
  const int n = static_cast<int>(block_of.size());

  std::vector<std::vector<Vertex>> upper(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t u) {
    Xoshiro256 rng(derive_seed(seed, u));
    const std::size_t bu = static_cast<std::size_t>(block_of[u]);
    for (int v = static_cast<int>(u) + 1; v < n; ++v) {
      const double p = density[bu * t + static_cast<std::size_t>(block_of[static_cast<std::size_t>(v)])];
      if (p <= 0.0) continue;
      if (p >= 1.0 || rng.bernoulli(p)) upper[u].push_back(v);
    }
  });
  GraphBuilder b(n);
  for (int u = 0; u < n; ++u)
    for (Vertex v : upper[static_cast<std::size_t>(u)]) b.add_edge(u, v);
  return std::move(b).build();
}

Graph gen_gnp(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gnp needs n >= 1");
  const int sizes[] = {n};
  const double density[] = {p};
  return gen_block_model(sizes, density, seed);
}

Graph gen_half_split(int n, double p, std::uint64_t seed) {
  GenSpec spec;
  spec.family = Family::half_split;
  spec.n = n;
  spec.p = p;
  spec.validate();
  const int sizes[] = {n / 2, n / 2};
  const double density[] = {2 * p, p, p, 0.0};
  return gen_block_model(sizes, density, seed);
}

PartitionStats planted_targets(int t, int part_size, int s, double x, double y) {
  require_planted_feasible(t, std::max(part_size, 1), s, x, y);
  const double background = std::sqrt(x);
  const double to_special = std::sqrt(y);
  const double special_inside = background * (2.0 * y - x) / y;
  const auto tt = static_cast<std::size_t>(t);
  std::vector<double> xs(tt, background), d(tt * tt, 0.0);
  xs[static_cast<std::size_t>(s)] = special_inside;
  for (std::size_t i = 0; i < tt; ++i)
    for (std::size_t j = 0; j < tt; ++j) {
      if (i == j) continue;
      d[i * tt + j] = (static_cast<int>(i) == s || static_cast<int>(j) == s) ? to_special : background;
    }
  return PartitionStats(part_size, std::move(xs), std::move(d));
}

GeneratedGraph gen_planted_structure(int t, int m, int s, double x, double y, std::uint64_t seed) {
  require_planted_feasible(t, m, s, x, y);
  // Sample with the special part at block 0, then move it to position s.
  const PartitionStats internal = planted_targets(t, m, 0, x, y);
  const auto tt = static_cast<std::size_t>(t);
  std::vector<double> density(tt * tt);
  for (std::size_t i = 0; i < tt; ++i)
    for (std::size_t j = 0; j < tt; ++j)
      density[i * tt + j] = i == j ? internal.x(static_cast<int>(i)) : internal.d(static_cast<int>(i), static_cast<int>(j));
  const std::vector<int> sizes(tt, m);
  const Graph sampled = gen_block_model(sizes, density, seed);

  // internal block b -> output part
  std::vector<int> out_part(tt);
  out_part[0] = s;
  for (int b = 1, q = 0; b < t; ++b, ++q) {
    if (q == s) ++q;
    out_part[static_cast<std::size_t>(b)] = q;
  }
  auto relabel = [&](Vertex v) { return out_part[static_cast<std::size_t>(v / m)] * m + v % m; };
  GraphBuilder b(t * m);
  for (const auto& [u, v] : sampled.edges()) b.add_edge(relabel(u), relabel(v));
  return {std::move(b).build(), consecutive_equipartition(t * m, t)};
}

GeneratedGraph gen_tripartite(int m, double d12, double d13, double d23, std::uint64_t seed) {
  GenSpec spec;
  spec.family = Family::tripartite;
  spec.m = m;
  spec.d12 = d12;
  spec.d13 = d13;
  spec.d23 = d23;
  spec.validate();
  const int sizes[] = {m, m, m};
  const double density[] = {0.0, d12, d13, d12, 0.0, d23, d13, d23, 0.0};
  return {gen_block_model(sizes, density, seed), consecutive_equipartition(3 * m, 3)};
}

Graph complete_graph(int n) {
  GraphBuilder b(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) b.add_edge(u, v);
  return std::move(b).build();
}

GeneratedGraph generate(const GenSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case Family::gnp: return {gen_gnp(spec.n, spec.p, spec.seed), consecutive_equipartition(spec.n, 1)};
    case Family::half_split:
      return {gen_half_split(spec.n, spec.p, spec.seed), consecutive_equipartition(spec.n, 2)};
    case Family::planted_structure:
      return gen_planted_structure(spec.t, spec.m, spec.s, spec.x, spec.y, spec.seed);
    case Family::tripartite: return gen_tripartite(spec.m, spec.d12, spec.d13, spec.d23, spec.seed);
    case Family::complete:
      return {complete_graph(spec.n), spec.n > 0 ? consecutive_equipartition(spec.n, 1) : Partition{}};
    case Family::empty: return {Graph(spec.n), spec.n > 0 ? consecutive_equipartition(spec.n, 1) : Partition{}};
  }
  throw std::logic_error("unhandled family");
}

Graph gen_min_degree(int n, int min_degree, double p, std::uint64_t seed) {
  if (min_degree > n - 1) throw std::invalid_argument("min_degree exceeds n - 1");
  const Graph base = gen_gnp(n, p, seed);
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : base.edges()) {
    adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  Xoshiro256 rng(derive_seed(seed, std::string_view("min-degree-fill")));
  for (int u = 0; u < n; ++u) {
    while (deg[static_cast<std::size_t>(u)] < min_degree) {
      std::vector<int> missing;
      for (int v = 0; v < n; ++v)
        if (v != u && !adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) missing.push_back(v);
      const int v = missing[rng.below(missing.size())];
      adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = adj[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
      ++deg[static_cast<std::size_t>(u)];
      ++deg[static_cast<std::size_t>(v)];
    }
  }
  GraphBuilder b(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) b.add_edge(u, v);
  return std::move(b).build();
}

VertexCut sample_balanced_cut(int n, std::span<const double> alpha, std::uint64_t seed) {
  const std::vector<int> sizes = part_sizes(n, alpha);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Xoshiro256 rng(seed);
  rng.shuffle(std::span<int>(perm));
  std::vector<int> part_of(static_cast<std::size_t>(n));
  std::size_t pos = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (int j = 0; j < sizes[i]; ++j) part_of[static_cast<std::size_t>(perm[pos++])] = static_cast<int>(i);
  return VertexCut::from_assignment(std::move(part_of), static_cast<int>(sizes.size()),
                                    std::vector<double>(alpha.begin(), alpha.end()));
}

std::vector<Vertex> sample_bernoulli_subset(int n, double alpha, std::uint64_t seed) {
  require_probability(alpha, "inclusion probability");
  Xoshiro256 rng(seed);
  std::vector<Vertex> out;
  for (int v = 0; v < n; ++v)
    if (rng.bernoulli(alpha)) out.push_back(v);
  return out;
}

EnumerationBudgetExceeded::EnumerationBudgetExceeded(std::optional<std::uint64_t> count, std::uint64_t budget)
    : std::runtime_error("enumeration of " + (count ? std::to_string(*count) : std::string("more than 2^64")) +
                         " cuts exceeds budget " + std::to_string(budget)),
      count_(count) {}

std::optional<std::uint64_t> count_cuts(int n, std::span<const double> alpha) {
  const auto sizes = part_sizes(n, alpha);
  return multinomial(sizes);
}

CutEnumerator::CutEnumerator(int n, std::span<const double> alpha, std::uint64_t budget)
    : alpha_(alpha.begin(), alpha.end()) {
  const auto sizes = part_sizes(n, alpha);
  const auto total = multinomial(sizes);
  if (!total || *total > budget) throw EnumerationBudgetExceeded(total, budget);
  count_ = *total;
  r_ = static_cast<int>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i)
    current_.insert(current_.end(), static_cast<std::size_t>(sizes[i]), static_cast<int>(i));
}

bool CutEnumerator::next(std::vector<int>& assignment) {
  if (done_) return false;
  if (started_ && !std::next_permutation(current_.begin(), current_.end())) {
    done_ = true;
    return false;
  }
  started_ = true;
  assignment = current_;
  return true;
}

std::optional<VertexCut> CutEnumerator::next_cut() {
  std::vector<int> a;
  if (!next(a)) return std::nullopt;
  return VertexCut::from_assignment(std::move(a), r_, alpha_);
}

}  // namespace qr
