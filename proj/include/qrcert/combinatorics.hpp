#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qr {

// Exact binomial coefficient; throws std::overflow_error past 2^64.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

// n! / prod(sizes[i]!), or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> multinomial(std::span<const int> sizes);

// Part sizes for an alpha vector: floor(alpha_i * n) each, with the leftover
// vertices going to the largest fractional remainders (ties to the lower
// index). Throws if alpha is empty, has non-positive entries, or does not
// sum to 1 within 1e-9.
std::vector<int> part_sizes(int n, std::span<const double> alpha);

// Balanced alpha vector (1/r, ..., 1/r).
std::vector<double> balanced_alpha(int r);

// k-subsets of {0..t-1} as bit masks, in colexicographic order (which is
// increasing numeric order of the masks).
std::vector<std::uint64_t> subsets_colex(int t, int k);

// Position of a k-subset mask in subsets_colex(t, k).
std::uint64_t colex_rank(std::uint64_t mask);

std::vector<int> mask_elements(std::uint64_t mask);
std::uint64_t elements_mask(std::span<const int> elements);

// "{0,2,5}"
std::string subset_label(std::uint64_t mask);

// Sum over k-subsets S of [r] of prod_{i in S} alpha_i (elementary symmetric
// polynomial e_k(alpha)).
double elementary_symmetric(std::span<const double> alpha, int k);

// Real vector indexed by the k-subsets of [t] in colex order.
struct DensityVectorK {
  int t = 0;
  int k = 0;
  std::vector<double> values;

  DensityVectorK() = default;
  DensityVectorK(int t_, int k_);

  double& at(std::uint64_t mask) { return values[colex_rank(mask)]; }
  double at(std::uint64_t mask) const { return values[colex_rank(mask)]; }
  std::size_t size() const { return values.size(); }
};

}  // namespace qr
