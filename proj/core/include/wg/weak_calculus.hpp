#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "wg/basis.hpp"
#include "wg/mesh.hpp"

namespace wg {

// Highest supported method order (element pieces P_k, edge pieces and
// gradients P_{k+1}).
inline constexpr int kMaxOrder = 4;

// Quadrature degree used for the discrete operator moments, exact for the
// products of P_{k+1} polynomials that appear there.
inline int operator_quad_degree(int k) { return 2 * (k + 2); }
// Quadrature degree for projecting / integrating smooth data against the
// discrete spaces; generous so data error never dominates.
inline int data_quad_degree(int k) { return 2 * k + 8; }

// Discrete unknown: a P_k polynomial per element plus an independent
// single-valued P_{k+1} polynomial per edge. Coefficients are stored as one
// flat vector, all element blocks first, then all edge blocks, matching the
// global DOF layout used by assembly.
struct WeakFunction {
  int k = 0;
  int n0 = 0;  // element block size, dim P_k
  int eb = 0;  // edge block size, k + 2
  int num_cells = 0;
  int num_edges = 0;
  Eigen::VectorXd coeffs;

  WeakFunction() = default;
  WeakFunction(const Mesh& m, int k);

  int size() const { return static_cast<int>(coeffs.size()); }
  int edge_offset(int e) const { return num_cells * n0 + e * eb; }
  Eigen::VectorBlock<Eigen::VectorXd> cell(int t) {
    return coeffs.segment(t * n0, n0);
  }
  Eigen::VectorBlock<Eigen::VectorXd> edge(int e) {
    return coeffs.segment(edge_offset(e), eb);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> cell(int t) const {
    return coeffs.segment(t * n0, n0);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> edge(int e) const {
    return coeffs.segment(edge_offset(e), eb);
  }
};

// Per-element discrete machinery. The vector space [P_{k+1}]^2 uses the
// scalar basis phi twice: q_i = (phi_i, 0) for i < n1 and (0, phi_{i-n1})
// beyond, so vector coefficients stack the x components before the y ones.
struct ElementOperators {
  int k = 0;
  int tri = -1;
  int n0 = 0, n1 = 0, eb = 0;
  ElementBasis interior;    // P_k, orthonormal
  ElementBasis gradspace;   // P_{k+1}, orthonormal
  std::vector<EdgeBasis> edge_basis;  // one per local edge
  Eigen::MatrixXd mass;               // (q_i, q_j)_T, 2n1 x 2n1
  Eigen::MatrixXd weighted_mass;      // (a q_i, q_j)_T
  Eigen::MatrixXd grad_map;           // discrete gradient, 2n1 x local_dofs()
  Eigen::MatrixXd interior_grad_gram; // (grad psi_i, grad psi_j)_T, n0 x n0

  int local_dofs() const { return n0 + 3 * eb; }
};

// Builds the element operators; the discrete gradient G of a local
// coefficient vector [cell | edge0 | edge1 | edge2] is defined by
//   (G, q)_T = -(v_cell, div q)_T + sum_e <v_edge, q . n>_e  for all q.
// a must be symmetric positive definite.
ElementOperators build_element_operators(const Mesh& m, int t, int k,
                                         const Eigen::Matrix2d& a);

// Gathers [cell | edge0 | edge1 | edge2] coefficients for element t.
Eigen::VectorXd local_coeffs(const WeakFunction& v, const Mesh& m, int t);

inline Eigen::VectorXd weak_gradient(const ElementOperators& ops,
                                     const Eigen::VectorXd& local) {
  return ops.grad_map * local;
}

// Discrete gradient of a globally continuous field evaluated through the
// same defining moments (integration by parts against the element, boundary
// term from the field's trace).
Eigen::VectorXd weak_gradient_of_field(const std::function<double(Vec2)>& f,
                                       const Mesh& m, int t,
                                       const ElementOperators& ops,
                                       int quad_degree);

// Componentwise L2 projection of a vector field onto [P_{k+1}]^2 of one
// element, in the stacked coefficient layout.
Eigen::VectorXd project_vector_field(const std::function<Vec2(Vec2)>& f,
                                     const ElementBasis& gradspace, Vec2 v0,
                                     Vec2 v1, Vec2 v2, int quad_degree);

// Evaluates a stacked vector coefficient set at points; out is np x 2.
Eigen::MatrixXd eval_vector_field(const ElementBasis& gradspace,
                                  const Eigen::VectorXd& c,
                                  std::span<const Vec2> pts);

// Elementwise L2 projection onto P_k plus edgewise projection onto P_{k+1}:
// the natural interpolant of a continuous function into the discrete space.
WeakFunction interpolate(const std::function<double(Vec2)>& u, const Mesh& m,
                         int k, int quad_degree);

}  // namespace wg
