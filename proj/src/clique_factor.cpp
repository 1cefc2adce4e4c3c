#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "qrcert/structure.hpp"

namespace qr {

namespace {

struct FactorSearch {
  int k;
  std::vector<std::uint32_t> nb;
  std::uint64_t budget;
  std::uint64_t nodes = 0;
  std::vector<std::vector<Vertex>> chosen;
  bool out_of_budget = false;

  bool cover(std::uint32_t uncovered) {
    if (uncovered == 0) return true;
    if (++nodes > budget) {
      out_of_budget = true;
      return false;
    }
    // Every uncovered vertex needs k-1 uncovered neighbours.
    for (std::uint32_t rest = uncovered; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      if (std::popcount(nb[static_cast<std::size_t>(v)] & uncovered) < k - 1) return false;
    }
    const int v = std::countr_zero(uncovered);
    std::vector<Vertex> clique{v};
    return extend(uncovered & ~(1U << v), nb[static_cast<std::size_t>(v)] & uncovered, clique);
  }

  // Grows `clique` from candidates above its last vertex, then recurses on the rest.
  bool extend(std::uint32_t uncovered, std::uint32_t candidates, std::vector<Vertex>& clique) {
    if (static_cast<int>(clique.size()) == k) {
      chosen.push_back(clique);
      if (cover(uncovered)) return true;
      chosen.pop_back();
      return false;
    }
    const int need = k - static_cast<int>(clique.size());
    for (std::uint32_t rest = candidates; rest; rest &= rest - 1) {
      if (std::popcount(rest) < need || out_of_budget) return false;
      const int w = std::countr_zero(rest);
      const std::uint32_t above = rest & ~(1U << w);
      clique.push_back(w);
      const bool ok = extend(uncovered & ~(1U << w), above & nb[static_cast<std::size_t>(w)], clique);
      clique.pop_back();
      if (ok) return true;
    }
    return false;
  }
};

}  // namespace

CliqueFactorResult clique_factor(const Graph& g, int k, std::uint64_t node_budget) {
  const int n = g.n();
  if (k < 1) throw std::invalid_argument("clique factor needs k >= 1");
  if (n > 32) throw std::invalid_argument("clique factor search needs n <= 32");
  if (n % k != 0) throw std::invalid_argument("clique factor needs k | n");
  FactorSearch search{k, std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0), node_budget, 0, {}, false};
  for (const auto& [u, v] : g.edges()) {
    search.nb[static_cast<std::size_t>(u)] |= 1U << v;
    search.nb[static_cast<std::size_t>(v)] |= 1U << u;
  }
  const std::uint32_t all = n == 32 ? ~0U : (1U << n) - 1;
  CliqueFactorResult out;
  const bool found = search.cover(all);
  out.nodes = search.nodes;
  if (found) {
    out.status = CliqueFactorResult::Status::found;
    out.cliques = std::move(search.chosen);
  } else {
    out.status = search.out_of_budget ? CliqueFactorResult::Status::budget_exceeded : CliqueFactorResult::Status::no_factor;
  }
  return out;
}

}  // namespace qr
