#include <gmpxx.h>

#include <algorithm>
#include <string>

#include "qrcert/exact_matrix.hpp"
#include "qrcert/rng.hpp"

namespace qr {

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  for (b %= m; e; e >>= 1) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
  }
  return r;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all 64-bit n.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s && composite; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t random_prime_62(std::uint64_t seed) {
  Xoshiro256 rng(seed);
  for (;;) {
    const std::uint64_t candidate = (rng() >> 3) | (std::uint64_t{1} << 61) | 1;
    if (is_prime(candidate)) return candidate;
  }
}

std::size_t rank_modular(const ExactMatrix& m, std::uint64_t prime) {
  if (prime < 2 || prime >= (std::uint64_t{1} << 63)) throw std::invalid_argument("modulus must lie in [2, 2^63)");
  const std::size_t rows = m.rows, cols = m.cols;
  std::vector<std::uint64_t> a(m.entries.size());
  const auto sp = static_cast<std::int64_t>(prime);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<std::uint64_t>(((m.entries[i] % sp) + sp) % sp);
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv * cols + c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != rank)
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(piv * cols), a.begin() + static_cast<std::ptrdiff_t>((piv + 1) * cols),
                       a.begin() + static_cast<std::ptrdiff_t>(rank * cols));
    std::uint64_t* prow = a.data() + rank * cols;
    const std::uint64_t inv = pow_mod(prow[c], prime - 2, prime);
    for (std::size_t j = c; j < cols; ++j) prow[j] = mul_mod(prow[j], inv, prime);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      std::uint64_t* row = a.data() + i * cols;
      const std::uint64_t f = row[c];
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        if (prow[j] == 0) continue;
        const std::uint64_t sub = mul_mod(f, prow[j], prime);
        row[j] = row[j] >= sub ? row[j] - sub : row[j] + prime - sub;
      }
    }
    ++rank;
  }
  return rank;
}

std::size_t rank_bareiss(const ExactMatrix& m) {
  const std::size_t rows = m.rows, cols = m.cols;
  std::vector<mpz_class> a(m.entries.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<long>(m.entries[i]);
  auto at = [&](std::size_t i, std::size_t j) -> mpz_class& { return a[i * cols + j]; };
  mpz_class prev = 1, tmp;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    // Pivot: largest absolute value in the column, first row on ties.
    std::size_t piv = rows;
    for (std::size_t i = rank; i < rows; ++i) {
      if (sgn(at(i, c)) == 0) continue;
      if (piv == rows || mpz_cmpabs(at(i, c).get_mpz_t(), at(piv, c).get_mpz_t()) > 0) piv = i;
    }
    if (piv == rows) continue;
    if (piv != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(piv, j), at(rank, j));
    const mpz_class& p = at(rank, c);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        tmp = p * at(i, j) - at(i, c) * at(rank, j);
        mpz_divexact(at(i, j).get_mpz_t(), tmp.get_mpz_t(), prev.get_mpz_t());
      }
      at(i, c) = 0;
    }
    prev = p;
    ++rank;
  }
  return rank;
}

RankResult rank_exact(const ExactMatrix& m, std::uint64_t seed, double bareiss_limit) {
  m.check();
  RankResult result;
  for (std::uint64_t i = 0; i < 2; ++i) {
    const std::uint64_t prime = random_prime_62(derive_seed(seed, i));
    result.modular.emplace_back(prime, rank_modular(m, prime));
  }
  const std::size_t full = std::min(m.rows, m.cols);
  const double work = static_cast<double>(m.rows) * static_cast<double>(m.cols) * static_cast<double>(full);
  if (work > bareiss_limit && result.modular[0].second == full) {
    if (result.modular[1].second != full)
      throw RankCrossCheckFailure("modular ranks disagree on a full-rank certificate");
    result.rank = full;
    result.method = "modular-certificate";
    return result;
  }
  result.rank = rank_bareiss(m);
  result.method = "bareiss";
  for (const auto& [prime, r] : result.modular)
    if (r != result.rank)
      throw RankCrossCheckFailure("rank mod " + std::to_string(prime) + " is " + std::to_string(r) +
                                  " but exact elimination gives " + std::to_string(result.rank));
  return result;
}

}  // namespace qr
