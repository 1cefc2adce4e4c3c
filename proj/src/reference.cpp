#include "qrcert/reference.hpp"

#include <functional>

namespace qr::reference {

Count edges_within(const Graph& g, const std::vector<Vertex>& u) {
  Count c = 0;
  for (std::size_t a = 0; a < u.size(); ++a)
    for (std::size_t b = a + 1; b < u.size(); ++b) c += g.has_edge(u[a], u[b]);
  return c;
}

Count edges_between(const Graph& g, const std::vector<Vertex>& x, const std::vector<Vertex>& y) {
  Count c = 0;
  for (Vertex a : x)
    for (Vertex b : y) c += g.has_edge(a, b);
  return c;
}

Count cliques_crossing(const Graph& g, const std::vector<int>& part_of, int k) {
  const int n = g.n();
  std::vector<Vertex> chosen;
  Count total = 0;
  std::function<void(Vertex)> grow = [&](Vertex from) {
    if (static_cast<int>(chosen.size()) == k) {
      ++total;
      return;
    }
    for (Vertex v = from; v < n; ++v) {
      bool ok = true;
      for (Vertex w : chosen)
        if (!g.has_edge(v, w) || part_of[static_cast<std::size_t>(v)] == part_of[static_cast<std::size_t>(w)]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      chosen.push_back(v);
      grow(v + 1);
      chosen.pop_back();
    }
  };
  grow(0);
  return total;
}

Count count_c4(const Graph& g) {
  const int n = g.n();
  Count total = 0;
  for (Vertex a = 0; a < n; ++a)
    for (Vertex b = a + 1; b < n; ++b)
      for (Vertex c = b + 1; c < n; ++c)
        for (Vertex d = c + 1; d < n; ++d) {
          // The three 4-cycles on {a,b,c,d}.
          total += g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(c, d) && g.has_edge(d, a);
          total += g.has_edge(a, b) && g.has_edge(b, d) && g.has_edge(d, c) && g.has_edge(c, a);
          total += g.has_edge(a, c) && g.has_edge(c, b) && g.has_edge(b, d) && g.has_edge(d, a);
        }
  return total;
}

Count hyperedges_crossing(const UniformHypergraph& h, const std::vector<int>& part_of) {
  Count total = 0;
  for (std::size_t e = 0; e < h.size(); ++e) {
    const auto edge = h.edge(e);
    bool ok = true;
    for (std::size_t a = 0; a < edge.size() && ok; ++a)
      for (std::size_t b = a + 1; b < edge.size() && ok; ++b)
        if (part_of[static_cast<std::size_t>(edge[a])] == part_of[static_cast<std::size_t>(edge[b])]) ok = false;
    total += ok;
  }
  return total;
}

}  // namespace qr::reference
