#pragma once

#include <utility>
#include <vector>

#include "wg/mesh.hpp"

namespace wg {

// Global DOF layout for order k: one block of dim P_k coefficients per
// element, then one block of k+2 coefficients per edge, in mesh order.
// Boundary-edge blocks are constrained (Dirichlet); everything else is free.
// Free DOFs are numbered by compacting the global order, so all element
// blocks come first and interior-edge blocks follow, each contiguous.
struct DofMap {
  int k = 0;
  int cell_block = 0;
  int edge_block = 0;
  int num_cells = 0;
  int num_edges = 0;
  int total = 0;
  int free_count = 0;
  int constrained_count = 0;
  std::vector<int> to_free;         // global -> free index, -1 if constrained
  std::vector<int> to_constrained;  // global -> constrained index, -1 if free

  int cell_offset(int t) const { return t * cell_block; }
  int edge_offset(int e) const {
    return num_cells * cell_block + e * edge_block;
  }
  // Contiguous (offset, size) runs in free numbering: one per element block,
  // then one per interior-edge block. Used as preconditioner blocks.
  std::vector<std::pair<int, int>> free_blocks() const;
  // Free index where the first edge block starts (= #interior DOFs).
  int free_interior_count() const { return num_cells * cell_block; }
};

DofMap build_dof_map(const Mesh& m, int k);

}  // namespace wg
