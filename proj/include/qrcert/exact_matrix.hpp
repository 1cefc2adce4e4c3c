#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrcert/generators.hpp"

namespace qr {

// Dense integer matrix with combinatorial row/column labels. The matrices
// built here are 0-1, so machine integers are exact.
struct ExactMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> entries;  // row-major
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  // Notes about how the matrix was built (e.g. "k<2").
  std::vector<std::string> flags;

  ExactMatrix() = default;
  ExactMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}

  std::int64_t at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  std::int64_t& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }

  // Throws std::logic_error when labels and dimensions disagree.
  void check() const;
  // Product with a real vector of length cols.
  std::vector<double> multiply(const std::vector<double>& v) const;
};

// B(t, h, k): rows are the h-subsets of [t], columns the k-subsets, both in
// colex order; entry (I, J) is 1 iff J is a subset of I. Requires
// t > h >= k >= 2; k = 1 is accepted and flagged.
ExactMatrix inclusion_matrix(int t, int h, int k);

// M(t, r, k): rows are the balanced ordered r-cuts of [t] in lexicographic
// order of their assignment vectors, columns the k-subsets in colex order;
// entry (X, J) is 1 iff J has at most one element in each part of X.
// Throws EnumerationBudgetExceeded when the cut count exceeds budget.
ExactMatrix crossing_matrix_M(int t, int r, int k, std::uint64_t budget = kDefaultEnumerationBudget);

// Rows of M whose cut separates 0 and 1, restricted to the columns whose
// k-subset contains both 0 and 1.
ExactMatrix crossing_submatrix_N(int t, int r, int k, std::uint64_t budget = kDefaultEnumerationBudget);

// The distinct rows of N, built from unordered equipartitions so that the
// ordered-cut budget does not apply. Same column order as N; rows appear in
// order of first occurrence over the unordered partitions in canonical
// (restricted growth) order.
ExactMatrix crossing_submatrix_N_distinct(int t, int r, int k);

// Keeps the first occurrence of every row.
ExactMatrix dedup_rows(const ExactMatrix& m);

// "# rows cols nonzeros" header, then one "row_label col_label value" line
// per nonzero entry in row-major order.
void write_triplets(std::ostream& out, const ExactMatrix& m);

struct RankResult {
  std::size_t rank = 0;
  // "bareiss" or "modular-certificate".
  std::string method;
  std::vector<std::pair<std::uint64_t, std::size_t>> modular;  // (prime, rank mod prime)
};

// Thrown when the modular cross-check disagrees with exact elimination.
class RankCrossCheckFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Rank modulo a prime below 2^63.
std::size_t rank_modular(const ExactMatrix& m, std::uint64_t prime);
// Rank over the rationals by fraction-free (Bareiss) elimination.
std::size_t rank_bareiss(const ExactMatrix& m);

// Exact rank over Q. Two random 62-bit primes are drawn from `seed`. A
// matrix whose rank modulo a prime equals min(rows, cols) has that rank
// over Q, so such matrices above `bareiss_limit` (rows * cols * min) are
// certified without big-integer elimination; everything else goes through
// Bareiss and must agree with both modular ranks.
RankResult rank_exact(const ExactMatrix& m, std::uint64_t seed = 0x5eed, double bareiss_limit = 2.0e7);

bool is_prime(std::uint64_t n);
// Random prime in [2^61, 2^62).
std::uint64_t random_prime_62(std::uint64_t seed);

}  // namespace qr
