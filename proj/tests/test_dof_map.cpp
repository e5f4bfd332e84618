#include "wg/dof_map.hpp"

#include <vector>

#include "doctest.h"
#include "wg/errors.hpp"
#include "wg/mesh.hpp"

using namespace wg;

TEST_CASE("counts on the level-2 grid, order 1") {
  // 8 elements with 3 cell DOFs each, 16 edges with 3 edge DOFs each;
  // 8 of the 16 edges lie on the boundary.
  const Mesh m = build_uniform_grid(2);
  const DofMap dofs = build_dof_map(m, 1);
  CHECK(dofs.cell_block == 3);
  CHECK(dofs.edge_block == 3);
  CHECK(dofs.total == 8 * 3 + 16 * 3);
  CHECK(dofs.constrained_count == 8 * 3);
  CHECK(dofs.free_count == dofs.total - dofs.constrained_count);
  CHECK(dofs.free_interior_count() == 24);
}

TEST_CASE("free/constrained form a partition consistent with edge flags") {
  const Mesh m = build_perturbed_grid(3, 9, 0.2);
  for (int k : {1, 2, 3}) {
    const DofMap dofs = build_dof_map(m, k);
    REQUIRE(static_cast<int>(dofs.to_free.size()) == dofs.total);
    REQUIRE(static_cast<int>(dofs.to_constrained.size()) == dofs.total);

    int nfree = 0, ncon = 0;
    for (int g = 0; g < dofs.total; ++g) {
      const bool isfree = dofs.to_free[g] >= 0;
      const bool iscon = dofs.to_constrained[g] >= 0;
      CHECK(isfree != iscon);  // exactly one numbering applies
      nfree += isfree;
      ncon += iscon;
    }
    CHECK(nfree == dofs.free_count);
    CHECK(ncon == dofs.constrained_count);

    // Free indices are a compaction of global order: strictly increasing.
    int prev = -1;
    for (int g = 0; g < dofs.total; ++g) {
      if (dofs.to_free[g] < 0) continue;
      CHECK(dofs.to_free[g] == prev + 1);
      prev = dofs.to_free[g];
    }

    // Cell DOFs are always free; edge DOFs are free iff the edge is interior.
    for (int t = 0; t < m.num_tris(); ++t)
      for (int i = 0; i < dofs.cell_block; ++i)
        CHECK(dofs.to_free[dofs.cell_offset(t) + i] >= 0);
    for (int e = 0; e < m.num_edges(); ++e)
      for (int i = 0; i < dofs.edge_block; ++i) {
        const bool isfree = dofs.to_free[dofs.edge_offset(e) + i] >= 0;
        CHECK(isfree == !m.edges[e].boundary);
      }
  }
}

TEST_CASE("free blocks tile the free numbering contiguously") {
  const Mesh m = build_uniform_grid(3);
  const DofMap dofs = build_dof_map(m, 2);
  const auto blocks = dofs.free_blocks();

  int interior_edges = 0;
  for (const Edge& e : m.edges) interior_edges += e.boundary ? 0 : 1;
  CHECK(static_cast<int>(blocks.size()) == m.num_tris() + interior_edges);

  int cursor = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    CHECK(blocks[b].first == cursor);
    const int want = b < static_cast<std::size_t>(m.num_tris())
                         ? dofs.cell_block
                         : dofs.edge_block;
    CHECK(blocks[b].second == want);
    cursor += blocks[b].second;
  }
  CHECK(cursor == dofs.free_count);
}

TEST_CASE("order bounds") {
  const Mesh m = build_uniform_grid(1);
  CHECK_THROWS_AS(build_dof_map(m, 0), ConfigError);
  CHECK_THROWS_AS(build_dof_map(m, 5), ConfigError);
}
