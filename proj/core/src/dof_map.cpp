#include "wg/dof_map.hpp"

#include <string>

#include "wg/errors.hpp"
#include "wg/weak_calculus.hpp"

namespace wg {

std::vector<std::pair<int, int>> DofMap::free_blocks() const {
  std::vector<std::pair<int, int>> blocks;
  blocks.reserve(num_cells + num_edges);
  for (int t = 0; t < num_cells; ++t)
    blocks.emplace_back(t * cell_block, cell_block);
  int at = num_cells * cell_block;
  for (int e = 0; e < num_edges; ++e) {
    if (to_free[edge_offset(e)] >= 0) {
      blocks.emplace_back(at, edge_block);
      at += edge_block;
    }
  }
  return blocks;
}

DofMap build_dof_map(const Mesh& m, int k) {
  if (k < 1 || k > kMaxOrder) {
    throw ConfigError("method order k must be in [1, " +
                      std::to_string(kMaxOrder) + "], got " +
                      std::to_string(k));
  }
  DofMap dm;
  dm.k = k;
  dm.cell_block = (k + 1) * (k + 2) / 2;
  dm.edge_block = k + 2;
  dm.num_cells = m.num_tris();
  dm.num_edges = m.num_edges();
  dm.total = dm.num_cells * dm.cell_block + dm.num_edges * dm.edge_block;

  dm.to_free.assign(dm.total, -1);
  dm.to_constrained.assign(dm.total, -1);
  int nfree = 0, ncon = 0;
  for (int g = 0; g < dm.num_cells * dm.cell_block; ++g) dm.to_free[g] = nfree++;
  for (int e = 0; e < dm.num_edges; ++e) {
    const int off = dm.edge_offset(e);
    for (int j = 0; j < dm.edge_block; ++j) {
      if (m.edges[e].boundary)
        dm.to_constrained[off + j] = ncon++;
      else
        dm.to_free[off + j] = nfree++;
    }
  }
  dm.free_count = nfree;
  dm.constrained_count = ncon;
  return dm;
}

}  // namespace wg
