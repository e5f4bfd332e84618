#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "wg/mesh.hpp"
#include "wg/problem.hpp"
#include "wg/weak_calculus.hpp"

namespace wg {

// Energy norm: root of sum over elements of the (optionally a-weighted)
// L2 norm squared of the discrete gradient.
double energy_norm(const WeakFunction& v, const Mesh& m,
                   const Eigen::Matrix2d* a = nullptr);

// Discrete H1 seminorm: element gradients of the cell pieces plus the
// 1/h_T weighted L2 jumps between cell and edge pieces over each element
// boundary.
double discrete_h1_norm(const WeakFunction& v, const Mesh& m);

struct ErrorSummary {
  double l2 = 0.0;               // cellwise ||Q0 u - u_0||
  double energy = 0.0;           // unweighted energy norm of Q_h u - u_h
  double weighted_energy = 0.0;  // a-weighted energy norm of the same
  double h1 = 0.0;               // discrete H1 seminorm of the same
};

// Errors against the interpolant of the exact solution (supercloseness
// convention: the discrete solution is compared with the projected exact
// solution, not with u itself). Requires problem.has_exact().
ErrorSummary compute_errors(const WeakFunction& uh, const ProblemSpec& problem,
                            const Mesh& m, int quad_degree = 0);

// One line of a refinement study.
struct StudyRow {
  int level = 0;
  double h = 0.0;
  int ndof = 0;  // free DOFs
  double l2_err = 0.0;
  double l2_rate = 0.0;  // NaN when no coarser level exists
  double energy_err = 0.0;
  double energy_rate = 0.0;
  double weighted_energy_err = 0.0;
  double h1_err = 0.0;
  int iterations = 0;
  double rel_residual = 0.0;
};

// Fills the rate columns from successive errors: log2(e_prev / e_cur),
// NaN for the first row or when an error vanishes.
void fill_rates(std::vector<StudyRow>& rows);

// Machine-readable study output. Header:
//   level,h,ndof,l2_err,l2_rate,energy_err,energy_rate
// Undefined rates are empty fields.
void write_csv(std::ostream& out, const std::vector<StudyRow>& rows);
// Human-readable fixed-width table of the same columns.
void write_table(std::ostream& out, const std::vector<StudyRow>& rows);

// The conforming-consistency boundary functional
//   l(v) = sum_T <a (grad u - P(grad u)) . n, v_0 - v_b>_dT,
// with P the elementwise vector projection; the discrete error e = Q_h u -
// u_h satisfies (a grad_w e, grad_w v) = l(v) for all v with zero boundary
// edges.
double consistency_functional(const ProblemSpec& problem,
                              const WeakFunction& v, const Mesh& m,
                              int quad_degree = 0);

// Verifies the identity above over every free test DOF; returns the max
// mismatch relative to the larger of the two sides. Requires an exact
// solution; uh should come from a tightly converged solve.
double error_equation_residual(const ProblemSpec& problem,
                               const WeakFunction& uh, const Mesh& m);

// Extreme generalized Rayleigh quotients between the discrete quadratic
// forms on the zero-boundary space, computed densely (free DOFs <= 2000).
struct NormEquivalenceReport {
  int k = 0;
  int free_dofs = 0;
  double alpha = 0.0;   // min of weighted/unweighted energy ratio, sqrt
  double beta = 0.0;    // max of the same
  double c_lower = 0.0; // min of energy / discrete-H1 ratio, sqrt
  double c_upper = 0.0; // max of the same
  double c_jump = 0.0;  // max of (1/h-weighted jump) / energy ratio
  double min_energy_eig = 0.0;  // of the energy form vs the H1 form
};
NormEquivalenceReport verify_norm_equivalence(const Mesh& m, int k,
                                              const Eigen::Matrix2d& a);

// Sharp constants of the two-triangle trace/jump bounds, measured as extreme
// eigenvalues on a patch of one unit triangle and one triangle hanging below
// the shared edge with the given apex (apex.y < 0). Constants are reported
// normalized by the patch diameter, so they are scale-invariant; the
// scaling defect is the relative drift after shrinking the patch 4x.
struct PatchLemmaReport {
  int k = 0;
  double h = 0.0;                       // patch diameter at unit scale
  double interface_constant = 0.0;      // cell-cell trace jump vs energy
  double boundary_jump_constant = 0.0;  // cell-edge jumps vs energy
  double min_energy_eigenvalue = 0.0;   // constants deflated
  double scaling_defect = 0.0;
};
PatchLemmaReport verify_patch_lemmas(int k, Vec2 apex = {0.5, -1.0});

}  // namespace wg
