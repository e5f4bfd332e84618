#pragma once

#include <cstdint>
#include <vector>

#include "wg/analysis.hpp"
#include "wg/assembly.hpp"
#include "wg/linsolve.hpp"
#include "wg/mesh.hpp"
#include "wg/problem.hpp"

namespace wg {

struct SolveOptions {
  double tol = 1e-12;
  int maxit = 0;       // <= 0: size-based default
  bool condense = false;
  int nthreads = 0;    // <= 0: hardware count
};

struct SolveResult {
  WeakFunction uh;
  SolveReport report;
  int free_dofs = 0;
  // Smallest Cholesky pivot met while factoring the preconditioner blocks
  // (and, when condensing, the interior blocks): a positive value witnesses
  // definiteness of everything that was factored.
  double min_block_pivot = 0.0;
};

// Assembles and solves one Dirichlet problem with block-Jacobi CG, either on
// the full free system or on the statically condensed edge system. Throws
// SolverError if the iteration breaks down or fails to converge.
SolveResult solve_problem(const Mesh& m, const ProblemSpec& problem, int k,
                          const SolveOptions& opts = {});

// A refinement family for convergence studies.
struct GridFamily {
  enum class Kind { uniform, perturbed };
  Kind kind = Kind::uniform;
  std::uint64_t seed = 1;
  double magnitude = 0.0;

  Mesh build(int level) const;
};

// Solves level_lo..level_hi and tabulates errors and rates.
std::vector<StudyRow> convergence_study(const ProblemSpec& problem, int k,
                                        const GridFamily& grids, int level_lo,
                                        int level_hi,
                                        const SolveOptions& opts = {});

}  // namespace wg
