#pragma once

// Direct-enumeration versions of the counting kernels, used to cross-check
// the fast ones. Cost is polynomial of high degree; keep n small.

#include <vector>

#include "qrcert/graph.hpp"

namespace qr::reference {

Count edges_within(const Graph& g, const std::vector<Vertex>& u);
Count edges_between(const Graph& g, const std::vector<Vertex>& x, const std::vector<Vertex>& y);
// k-cliques with pairwise distinct parts under `part_of`.
Count cliques_crossing(const Graph& g, const std::vector<int>& part_of, int k);
// 4-cycle subgraphs, from the three cyclic orders of every 4-set.
Count count_c4(const Graph& g);
Count hyperedges_crossing(const UniformHypergraph& h, const std::vector<int>& part_of);

}  // namespace qr::reference
