#pragma once

#include <Eigen/Dense>

#include "wg/dof_map.hpp"
#include "wg/linsolve.hpp"
#include "wg/mesh.hpp"
#include "wg/problem.hpp"
#include "wg/weak_calculus.hpp"

namespace wg {

// Element stiffness: G' (a q, q) G over the local [cell | edges] coefficients,
// where G is the element's discrete gradient map.
Eigen::MatrixXd local_stiffness(const ElementOperators& ops);

// Element load vector (f, psi_i) against the interior basis, padded with
// zeros on the edge blocks.
Eigen::VectorXd local_load(const std::function<double(Vec2)>& f, const Mesh& m,
                           int t, const ElementOperators& ops,
                           int quad_degree);

// Global system over the free DOFs. Boundary-edge coefficients hold the edge
// projection of g and are eliminated into the right-hand side.
struct AssembledSystem {
  DofMap dofs;
  CsrMatrix matrix;
  Eigen::VectorXd rhs;          // free numbering
  Eigen::VectorXd constrained;  // constrained numbering

  // Scatters [free | constrained] solution values into a weak function.
  WeakFunction expand(const Mesh& m, const Eigen::VectorXd& x_free) const;
};

// Local matrices are computed element-parallel; the scatter into triplets is
// serial in element order, so the matrix is bit-identical for any thread
// count.
AssembledSystem assemble_system(const Mesh& m, const ProblemSpec& problem,
                                int k, int nthreads = 0);

}  // namespace wg
