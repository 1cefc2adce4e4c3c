#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qr {

using Vertex = int;

// Fixed-width bit set over [0, size). Binary operations require equal sizes.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  static Bitset from_vertices(std::size_t bits, std::span<const Vertex> vertices) {
    Bitset b(bits);
    for (Vertex v : vertices) {
      if (v < 0 || static_cast<std::size_t>(v) >= bits)
        throw std::out_of_range("vertex index out of range");
      b.set(static_cast<std::size_t>(v));
    }
    return b;
  }

  std::size_t size() const { return bits_; }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  Bitset& operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Bitset& operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  friend Bitset operator&(Bitset a, const Bitset& b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset& b) { return a |= b; }
  friend bool operator==(const Bitset&, const Bitset&) = default;

  bool intersects(const Bitset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word) {
        const int b = std::countr_zero(word);
        f(static_cast<Vertex>(w * 64 + static_cast<std::size_t>(b)));
        word &= word - 1;
      }
    }
  }

  std::vector<Vertex> to_vector() const {
    std::vector<Vertex> out;
    out.reserve(count());
    for_each([&](Vertex v) { out.push_back(v); });
    return out;
  }

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t intersect_count(const Bitset& a, const Bitset& b) {
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t c = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    c += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return c;
}

inline std::size_t intersect_count(const Bitset& a, const Bitset& b, const Bitset& c) {
  const auto wa = a.words();
  const auto wb = b.words();
  const auto wc = c.words();
  std::size_t n = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    n += static_cast<std::size_t>(std::popcount(wa[i] & wb[i] & wc[i]));
  return n;
}

}  // namespace qr
