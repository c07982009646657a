#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/program.hpp"

namespace wsp {

// Mixed graph over instruction positions: directed dependency edges (always
// earlier -> later) and undirected fuse-preventing edges. `program` is null
// for reduction-built instances (see MwcInstance).
struct WspGraph {
  const Program* program = nullptr;
  uint32_t n = 0;
  std::vector<std::pair<uint32_t, uint32_t>> dep_edges;     // (i, j), i < j
  std::vector<std::pair<uint32_t, uint32_t>> forbid_edges;  // (i, j), i < j

  std::vector<std::vector<uint32_t>> dep_out, dep_in, forbid_adj;

  void build_adjacency();
  bool has_forbid(uint32_t a, uint32_t b) const;
};

// True iff executing j before i could change the result: i's writes conflict
// with j's accesses, i's reads conflict with j's writes, or one is DEL/SYNC
// on a base the other touches.
bool depends(const Program& p, uint32_t i, uint32_t j);

// Def-"fusible" pairwise view conditions plus the element-wise shape
// constraint; DEL/SYNC fuse with everything.
bool fusible(const Program& p, uint32_t i, uint32_t j);

WspGraph build_wsp(const Program& p);

// Multiway-cut instance used as the hardness/test oracle.
struct MwcInstance {
  uint32_t n = 0;
  struct Edge {
    uint32_t u, v;
    uint64_t w;
  };
  std::vector<Edge> edges;
  std::vector<uint32_t> terminals;  // k >= 3 distinct vertices
};

// The reduction's graph part: no dependency edges; forbid edges pairwise
// among the terminals. Pair with the cut-weight cost model (cost module).
WspGraph mwc_graph(const MwcInstance& m);

}  // namespace wsp
