#include "qrcert/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qr {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > ~std::uint64_t{0}) throw std::overflow_error("binomial overflows 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

std::optional<std::uint64_t> multinomial(std::span<const int> sizes) {
  unsigned __int128 acc = 1;
  std::uint64_t placed = 0;
  for (int s : sizes) {
    if (s < 0) throw std::invalid_argument("negative part size");
    for (int i = 1; i <= s; ++i) {
      ++placed;
      acc = acc * placed / static_cast<unsigned>(i);
      if (acc > ~std::uint64_t{0}) return std::nullopt;
    }
  }
  return static_cast<std::uint64_t>(acc);
}

std::vector<int> part_sizes(int n, std::span<const double> alpha) {
  if (alpha.empty()) throw std::invalid_argument("alpha vector is empty");
  if (n < 0) throw std::invalid_argument("negative vertex count");
  double total = 0;
  for (double a : alpha) {
    if (!(a > 0)) throw std::invalid_argument("alpha entries must be positive");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("alpha must sum to 1");

  std::vector<int> sizes(alpha.size());
  std::vector<double> remainder(alpha.size());
  int used = 0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double exact = alpha[i] * n;
    // Guard against 0.999999 * n style rounding just below an integer.
    double fl = std::floor(exact + 1e-9);
    sizes[i] = static_cast<int>(fl);
    remainder[i] = std::max(0.0, exact - fl);
    used += sizes[i];
  }
  std::vector<std::size_t> order(alpha.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; used < n; ++i) {
    ++sizes[order[i % order.size()]];
    ++used;
  }
  return sizes;
}

std::vector<double> balanced_alpha(int r) {
  if (r < 1) throw std::invalid_argument("part count must be positive");
  return std::vector<double>(static_cast<std::size_t>(r), 1.0 / r);
}

std::vector<std::uint64_t> subsets_colex(int t, int k) {
  if (t < 0 || t > 63 || k < 0) throw std::invalid_argument("subset parameters out of range");
  std::vector<std::uint64_t> out;
  if (k > t) return out;
  out.reserve(binomial(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k)));
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = std::uint64_t{1} << t;
  std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  while (mask < limit) {
    out.push_back(mask);
    // Gosper's hack: next larger integer with the same popcount.
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return out;
}

std::uint64_t colex_rank(std::uint64_t mask) {
  std::uint64_t rank = 0;
  std::uint64_t i = 1;
  while (mask) {
    const auto c = static_cast<std::uint64_t>(std::countr_zero(mask));
    rank += binomial(c, i);
    ++i;
    mask &= mask - 1;
  }
  return rank;
}

std::vector<int> mask_elements(std::uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

std::uint64_t elements_mask(std::span<const int> elements) {
  std::uint64_t mask = 0;
  for (int e : elements) {
    if (e < 0 || e > 63) throw std::out_of_range("subset element out of range");
    mask |= std::uint64_t{1} << e;
  }
  return mask;
}

std::string subset_label(std::uint64_t mask) {
  std::string s = "{";
  bool first = true;
  for (int e : mask_elements(mask)) {
    if (!first) s += ',';
    s += std::to_string(e);
    first = false;
  }
  return s + "}";
}

double elementary_symmetric(std::span<const double> alpha, int k) {
  // e_j(alpha) by the standard DP.
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (double a : alpha)
    for (int j = k; j >= 1; --j) e[static_cast<std::size_t>(j)] += a * e[static_cast<std::size_t>(j) - 1];
  return e[static_cast<std::size_t>(k)];
}

DensityVectorK::DensityVectorK(int t_, int k_)
    : t(t_), k(k_),
      values(binomial(static_cast<std::uint64_t>(t_), static_cast<std::uint64_t>(k_)), 0.0) {}

}  // namespace qr
