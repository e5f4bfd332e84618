#include "wg/assembly.hpp"

#include <vector>

#include "wg/errors.hpp"
#include "wg/parallel.hpp"

namespace wg {

Eigen::MatrixXd local_stiffness(const ElementOperators& ops) {
  return ops.grad_map.transpose() * ops.weighted_mass * ops.grad_map;
}

Eigen::VectorXd local_load(const std::function<double(Vec2)>& f, const Mesh& m,
                           int t, const ElementOperators& ops,
                           int quad_degree) {
  const auto v = m.tri_vertices(t);
  const MappedQuadrature quad =
      map_to_triangle(triangle_quadrature(quad_degree), v[0], v[1], v[2]);
  const Eigen::MatrixXd vals = ops.interior.values(quad.pts);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ops.local_dofs());
  for (int q = 0; q < quad.size(); ++q)
    out.head(ops.n0).noalias() +=
        quad.wts[q] * f(quad.pts[q]) * vals.row(q).transpose();
  return out;
}

WeakFunction AssembledSystem::expand(const Mesh& m,
                                     const Eigen::VectorXd& x_free) const {
  WeakFunction u(m, dofs.k);
  for (int g = 0; g < dofs.total; ++g) {
    u.coeffs[g] = dofs.to_free[g] >= 0 ? x_free[dofs.to_free[g]]
                                       : constrained[dofs.to_constrained[g]];
  }
  return u;
}

AssembledSystem assemble_system(const Mesh& m, const ProblemSpec& problem,
                                int k, int nthreads) {
  validate_problem(problem);
  AssembledSystem sys;
  sys.dofs = build_dof_map(m, k);
  const DofMap& dm = sys.dofs;
  const int nt = m.num_tris();
  const int nloc = dm.cell_block + 3 * dm.edge_block;

  struct LocalPiece {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
  };
  std::vector<LocalPiece> pieces(nt);
  const int load_deg = data_quad_degree(k);
  parallel_for(nt, nthreads, [&](int t) {
    const ElementOperators ops = build_element_operators(m, t, k, problem.a);
    pieces[t].a = local_stiffness(ops);
    pieces[t].b = local_load(problem.f, m, t, ops, load_deg);
  });

  // Dirichlet values: edge projection of g on each boundary edge.
  sys.constrained = Eigen::VectorXd::Zero(dm.constrained_count);
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.edges[e].boundary) continue;
    const EdgeBasis basis(k + 1, m.edges[e].length);
    const Eigen::VectorXd ge =
        project_onto_edge(problem.g, basis, m.nodes[m.edges[e].nodes[0]],
                          m.nodes[m.edges[e].nodes[1]], load_deg);
    const int off = dm.edge_offset(e);
    for (int j = 0; j < dm.edge_block; ++j)
      sys.constrained[dm.to_constrained[off + j]] = ge[j];
  }

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(nt) * nloc * nloc);
  sys.rhs = Eigen::VectorXd::Zero(dm.free_count);
  std::vector<int> global(nloc);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < dm.cell_block; ++i)
      global[i] = dm.cell_offset(t) + i;
    for (int j = 0; j < 3; ++j) {
      const int off = dm.edge_offset(m.tri_edges[t][j]);
      for (int i = 0; i < dm.edge_block; ++i)
        global[dm.cell_block + j * dm.edge_block + i] = off + i;
    }
    const LocalPiece& piece = pieces[t];
    for (int i = 0; i < nloc; ++i) {
      const int fi = dm.to_free[global[i]];
      if (fi < 0) continue;
      sys.rhs[fi] += piece.b[i];
      for (int j = 0; j < nloc; ++j) {
        const int fj = dm.to_free[global[j]];
        if (fj >= 0) {
          triplets.push_back({fi, fj, piece.a(i, j)});
        } else {
          sys.rhs[fi] -=
              piece.a(i, j) * sys.constrained[dm.to_constrained[global[j]]];
        }
      }
    }
  }
  sys.matrix = CsrMatrix::from_triplets(dm.free_count, std::move(triplets));
  return sys;
}

}  // namespace wg
