#include "qrcert/structure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qrcert/kv.hpp"
#include "qrcert/parallel.hpp"
#include "qrcert/rng.hpp"

namespace qr {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

std::vector<Vertex> sample_from(const std::vector<Vertex>& part, std::size_t size, Xoshiro256& rng) {
  std::vector<Vertex> pool = part;
  for (std::size_t a = 0; a < size; ++a) std::swap(pool[a], pool[a + rng.below(pool.size() - a)]);
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<Vertex> exchange(const std::vector<Vertex>& keep_from, const std::vector<Vertex>& removed,
                             const std::vector<Vertex>& added) {
  std::vector<Vertex> out;
  for (Vertex v : keep_from)
    if (!std::binary_search(removed.begin(), removed.end(), v)) out.push_back(v);
  out.insert(out.end(), added.begin(), added.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_positive(double v) {
  if (!(v > 0)) throw std::invalid_argument("transformed densities need positive pair densities");
}

double product_to(const PartitionStats& st, std::uint64_t set, int j) {
  double prod = 1.0;
  for (int a : mask_elements(set)) {
    const double v = st.d(a, j);
    require_positive(v);
    prod *= v;
  }
  return prod;
}

void check_index(const PartitionStats& st, int i) {
  if (i < 0 || i >= st.t()) throw std::out_of_range("part index out of range");
}

void check_disjoint(std::uint64_t set_i, std::initializer_list<int> js) {
  for (int j : js)
    if ((set_i >> j) & 1) throw std::invalid_argument("index set I must not contain the j indices");
}

}  // namespace

// ---- swap partitions ----

double SwapOutcome::max_prediction_error() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < d_prime.size(); ++a) worst = std::max(worst, std::abs(d_prime.values[a] - predicted.values[a]));
  return worst;
}

SwapOutcome swap_experiment(const Graph& g, const Partition& parts, int i, int j, double alpha, std::uint64_t seed,
                            int k) {
  const int t = static_cast<int>(parts.size());
  if (i < 0 || j < 0 || i >= t || j >= t || i == j) throw std::invalid_argument("swap needs two distinct part indices");
  if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("swap fraction alpha must lie in [0,1]");
  if (k < 2 || k > t) throw std::invalid_argument("swap needs 2 <= k <= t");
  const std::size_t m = parts.front().size();
  for (const auto& p : parts)
    if (p.size() != m) throw std::invalid_argument("swap needs equal part sizes");
  const auto size = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(m) + 1e-9));
  if (alpha > 0 && size < 1) throw std::invalid_argument("swap needs alpha * m >= 1");

  SwapOutcome out;
  out.i = i;
  out.j = j;
  out.k = k;
  out.alpha = alpha;
  out.alpha_effective = static_cast<double>(size) / static_cast<double>(m);
  Xoshiro256 rng(seed);
  out.u_i = sample_from(parts[static_cast<std::size_t>(i)], size, rng);
  out.u_j = sample_from(parts[static_cast<std::size_t>(j)], size, rng);

  Partition mixed = parts;
  mixed[static_cast<std::size_t>(i)] = exchange(parts[static_cast<std::size_t>(i)], out.u_i, out.u_j);
  mixed[static_cast<std::size_t>(j)] = exchange(parts[static_cast<std::size_t>(j)], out.u_j, out.u_i);
  Partition flipped = parts;
  std::swap(flipped[static_cast<std::size_t>(i)], flipped[static_cast<std::size_t>(j)]);

  out.stats = partition_stats(g, parts);
  out.d0 = clique_density_vector(g, parts, k);
  out.d_alpha = clique_density_vector(g, mixed, k);
  out.d1 = clique_density_vector(g, flipped, k);

  const double a = out.alpha_effective;
  out.d_prime = DensityVectorK(t, k);
  out.predicted = DensityVectorK(t, k);
  const auto masks = subsets_colex(t, k);
  const std::uint64_t both = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
  for (std::size_t e = 0; e < masks.size(); ++e) {
    out.d_prime.values[e] = out.d_alpha.values[e] - (1 - a) * out.d0.values[e] - a * out.d1.values[e];
    if ((masks[e] & both) == both) out.predicted.values[e] = a * (1 - a) * clique_residual(out.stats, masks[e], i, j);
  }
  return out;
}

double predicted_d12k(double x1, double x2, double d12, double d1k, double d2k, double alpha) {
  const double a = alpha;
  return ((1 - a) * (1 - a) + a * a) * d12 * d1k * d2k + a * (1 - a) * (x1 * d1k * d1k + x2 * d2k * d2k);
}

double triple_residual(double x_i, double x_j, double d_ij, double d_ik, double d_jk) {
  return x_i * d_ik * d_ik + x_j * d_jk * d_jk - 2 * d_ij * d_ik * d_jk;
}

// ---- classification ----

std::string StructureVerdict::tag_name() const {
  switch (tag) {
    case Tag::uniform: return "uniform";
    case Tag::special_vertex: return "special_vertex";
    case Tag::unstructured: return "unstructured";
  }
  return "?";
}

std::string StructureVerdict::to_text() const {
  KeyValues kv;
  kv.set("verdict", tag_name());
  kv.set("tol", format_double(tol));
  if (tag == Tag::uniform) kv.set("p", format_double(p));
  if (tag == Tag::special_vertex) {
    kv.set("s", std::to_string(s));
    kv.set("x", format_double(x));
    kv.set("y", format_double(y));
    kv.set("sqrt_x", format_double(std::sqrt(x)));
    kv.set("sqrt_y", format_double(std::sqrt(y)));
  }
  kv.set("z", format_double(z));
  kv.set("uniform_residual", format_double(uniform_residual));
  kv.set("special_residual", format_double(special_residual));
  kv.set("best_s", std::to_string(best_s));
  kv.set("residuals", join_doubles(residuals));
  return kv.to_text();
}

StructureVerdict classify_structure(const PartitionStats& stats, double tol) {
  const int t = stats.t();
  if (t < 4) throw std::invalid_argument("classification needs t >= 4");
  if (!(stats.min_pair_density() > 0)) throw std::invalid_argument("classification needs every d_ij > 0");
  if (!(tol >= 0)) throw std::invalid_argument("tolerance must be non-negative");

  StructureVerdict v;
  v.tol = tol;

  // Uniform template: one value for every x_i and d_ij.
  std::vector<double> all = stats.x_values();
  for (int a = 0; a < t; ++a)
    for (int b = a + 1; b < t; ++b) all.push_back(stats.d(a, b));
  const double common = median(all);
  std::vector<double> uniform_res;
  for (double val : all) uniform_res.push_back(std::abs(val - common));
  v.uniform_residual = *std::max_element(uniform_res.begin(), uniform_res.end());

  // Special-vertex template for each candidate s.
  std::vector<double> best_res;
  double best_sx = 0, best_sy = 0;
  v.special_residual = INFINITY;
  for (int s = 0; s < t; ++s) {
    std::vector<double> off, to;
    for (int a = 0; a < t; ++a)
      for (int b = a + 1; b < t; ++b) (a == s || b == s ? to : off).push_back(stats.d(a, b));
    const double sx = median(off), sy = median(to);
    const double x = sx * sx, y = sy * sy;
    const double x_special = sx * (2 * y - x) / y;
    std::vector<double> res;
    for (int a = 0; a < t; ++a) res.push_back(std::abs(stats.x(a) - (a == s ? x_special : sx)));
    for (int a = 0; a < t; ++a)
      for (int b = a + 1; b < t; ++b) res.push_back(std::abs(stats.d(a, b) - (a == s || b == s ? sy : sx)));
    const double worst = *std::max_element(res.begin(), res.end());
    if (worst < v.special_residual) {
      v.special_residual = worst;
      v.best_s = s;
      best_res = std::move(res);
      best_sx = sx;
      best_sy = sy;
    }
  }
  v.z = best_sx * best_sx;

  if (v.uniform_residual <= tol) {
    v.tag = StructureVerdict::Tag::uniform;
    v.p = common;
    v.residuals = std::move(uniform_res);
  } else if (v.special_residual <= tol) {
    v.tag = StructureVerdict::Tag::special_vertex;
    v.s = v.best_s;
    v.x = best_sx * best_sx;
    v.y = best_sy * best_sy;
    v.residuals = std::move(best_res);
  } else {
    v.tag = StructureVerdict::Tag::unstructured;
    v.residuals = v.special_residual < v.uniform_residual ? std::move(best_res) : std::move(uniform_res);
  }
  return v;
}

ResidualSummary residual_matrix(const PartitionStats& stats) {
  const int t = stats.t();
  if (t < 3) throw std::invalid_argument("residual matrix needs t >= 3");
  ResidualSummary out;
  double sum = 0.0;
  for (int a = 0; a < t; ++a)
    for (int b = a + 1; b < t; ++b)
      for (int c = b + 1; c < t; ++c) {
        const int tri[3][3] = {{a, b, c}, {a, c, b}, {b, c, a}};
        for (const auto& o : tri) {
          const int i = o[0], j = o[1], k = o[2];
          const double r = std::abs(triple_residual(stats.x(i), stats.x(j), stats.d(i, j), stats.d(i, k), stats.d(j, k)));
          out.max_abs = std::max(out.max_abs, r);
          sum += r;
          ++out.count;
        }
      }
  out.mean_abs = sum / static_cast<double>(out.count);
  return out;
}

// ---- general k ----

double pair_product(const PartitionStats& stats, std::uint64_t set_j) {
  const auto el = mask_elements(set_j);
  double prod = 1.0;
  for (std::size_t a = 0; a < el.size(); ++a)
    for (std::size_t b = a + 1; b < el.size(); ++b) prod *= stats.d(el[a], el[b]);
  return prod;
}

double transformed_pair(const PartitionStats& stats, std::uint64_t set_i, int j1, int j2) {
  check_index(stats, j1);
  check_index(stats, j2);
  if (j1 == j2) throw std::invalid_argument("transformed pair needs distinct indices");
  check_disjoint(set_i, {j1, j2});
  const double inner = pair_product(stats, set_i);
  require_positive(inner);
  return stats.d(j1, j2) * std::sqrt(product_to(stats, set_i, j1)) * std::sqrt(product_to(stats, set_i, j2)) *
         std::cbrt(inner);
}

double transformed_self(const PartitionStats& stats, std::uint64_t set_i, int j) {
  check_index(stats, j);
  check_disjoint(set_i, {j});
  const double inner = pair_product(stats, set_i);
  require_positive(inner);
  return stats.x(j) * product_to(stats, set_i, j) * std::cbrt(inner);
}

TransformedDensities transform_densities(const PartitionStats& stats, std::uint64_t set_i, const std::vector<int>& js) {
  TransformedDensities out;
  out.js = js;
  const std::size_t n = js.size();
  out.x.resize(n);
  out.d.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    out.x[a] = transformed_self(stats, set_i, js[a]);
    for (std::size_t b = a + 1; b < n; ++b)
      out.d[a * n + b] = out.d[b * n + a] = transformed_pair(stats, set_i, js[a], js[b]);
  }
  return out;
}

double general_triple_residual(const PartitionStats& stats, std::uint64_t set_i, int j1, int j2, int j3) {
  const auto td = transform_densities(stats, set_i, {j1, j2, j3});
  // positions: j1 = 0, j2 = 1, j3 = 2
  return triple_residual(td.x[0], td.x[1], td.d[0 * 3 + 1], td.d[0 * 3 + 2], td.d[1 * 3 + 2]);
}

double clique_extension_term(const PartitionStats& stats, std::uint64_t set_jprime, int j) {
  check_index(stats, j);
  double prod = 1.0;
  for (int a : mask_elements(set_jprime)) prod *= stats.d(a, j);
  return stats.x(j) * prod * prod * pair_product(stats, set_jprime);
}

double clique_residual(const PartitionStats& stats, std::uint64_t set_j, int j1, int j2) {
  const std::uint64_t pair = (std::uint64_t{1} << j1) | (std::uint64_t{1} << j2);
  if ((set_j & pair) != pair || j1 == j2) throw std::invalid_argument("clique residual needs j1, j2 in J");
  const std::uint64_t rest = set_j & ~pair;
  return clique_extension_term(stats, rest, j1) + clique_extension_term(stats, rest, j2) - 2 * pair_product(stats, set_j);
}

ExcellentAnalysis excellent_analysis(const PartitionStats& stats, int k, double tol) {
  const int t = stats.t();
  if (k < 3 || k > t) throw std::invalid_argument("excellent analysis needs 3 <= k <= t");
  if (!(stats.min_pair_density() > 0)) throw std::invalid_argument("excellent analysis needs every d_ij > 0");
  ExcellentAnalysis out;
  out.t = t;
  out.k = k;
  out.tol = tol;

  // d^I for all pairs disjoint from I, and p_I as their median.
  const auto is = subsets_colex(t, k - 3);
  const auto tt = static_cast<std::size_t>(t);
  std::vector<std::vector<double>> dI(is.size(), std::vector<double>(tt * tt, 0.0));
  for (std::size_t q = 0; q < is.size(); ++q) {
    std::vector<double> values;
    for (int a = 0; a < t; ++a)
      for (int b = a + 1; b < t; ++b) {
        if (((is[q] >> a) & 1) || ((is[q] >> b) & 1)) continue;
        const double v = transformed_pair(stats, is[q], a, b);
        dI[q][static_cast<std::size_t>(a) * tt + static_cast<std::size_t>(b)] = v;
        values.push_back(v);
      }
    out.p_i.emplace_back(is[q], median(values));
  }

  const auto tuples = subsets_colex(t, k);
  out.tuples = tuples.size();
  std::vector<char> excellent(tuples.size(), 0);
  std::vector<double> spread(tuples.size(), 0.0);
  parallel_for(tuples.size(), [&](std::size_t idx) {
    const auto el = mask_elements(tuples[idx]);
    bool ok = true;
    for (std::uint64_t sub : subsets_colex(k, k - 3)) {
      std::uint64_t set_i = 0;
      for (int b : mask_elements(sub)) set_i |= std::uint64_t{1} << el[static_cast<std::size_t>(b)];
      const std::size_t q = colex_rank(set_i);
      const double p = out.p_i[q].second;
      const auto rest = mask_elements(tuples[idx] & ~set_i);
      for (std::size_t a = 0; a < rest.size() && ok; ++a)
        for (std::size_t b = a + 1; b < rest.size() && ok; ++b) {
          const double v = dI[q][static_cast<std::size_t>(rest[a]) * tt + static_cast<std::size_t>(rest[b])];
          if (std::abs(v - p) > tol) ok = false;
        }
      if (!ok) break;
    }
    excellent[idx] = ok;
    if (ok) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t a = 0; a < el.size(); ++a)
        for (std::size_t b = a + 1; b < el.size(); ++b) {
          lo = std::min(lo, stats.d(el[a], el[b]));
          hi = std::max(hi, stats.d(el[a], el[b]));
        }
      spread[idx] = hi - lo;
    }
  });

  std::vector<std::uint64_t> pair_count(tt * tt, 0);
  for (std::size_t idx = 0; idx < tuples.size(); ++idx) {
    if (!excellent[idx]) continue;
    out.excellent_tuples.push_back(tuples[idx]);
    out.max_spread = std::max(out.max_spread, spread[idx]);
    const auto el = mask_elements(tuples[idx]);
    for (std::size_t a = 0; a < el.size(); ++a)
      for (std::size_t b = a + 1; b < el.size(); ++b)
        ++pair_count[static_cast<std::size_t>(el[a]) * tt + static_cast<std::size_t>(el[b])];
  }
  out.excellent_fraction = static_cast<double>(out.excellent_tuples.size()) / static_cast<double>(out.tuples);
  const double threshold =
      2.0 / 3.0 * static_cast<double>(binomial(static_cast<std::uint64_t>(t - 2), static_cast<std::uint64_t>(k - 2)));
  for (int a = 0; a < t; ++a)
    for (int b = a + 1; b < t; ++b)
      if (static_cast<double>(pair_count[static_cast<std::size_t>(a) * tt + static_cast<std::size_t>(b)]) >= threshold)
        out.excellent_pairs.emplace_back(a, b);
  return out;
}

}  // namespace qr
