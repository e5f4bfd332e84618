#include "wg/driver.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "wg/errors.hpp"

namespace wg {

namespace {

[[noreturn]] void throw_solver_failure(const SolveReport& report) {
  if (report.status == SolveStatus::breakdown)
    throw SolverError(
        "conjugate gradients broke down: matrix is not positive definite");
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "conjugate gradients stalled after %d iterations "
                "(relative residual %.3e)",
                report.iterations, report.rel_residual);
  throw SolverError(buf);
}

}  // namespace

SolveResult solve_problem(const Mesh& m, const ProblemSpec& problem, int k,
                          const SolveOptions& opts) {
  AssembledSystem sys = assemble_system(m, problem, k, opts.nthreads);
  const DofMap& dm = sys.dofs;

  SolveResult result;
  result.free_dofs = dm.free_count;

  Eigen::VectorXd x_free;
  if (opts.condense) {
    std::vector<std::pair<int, int>> interior_blocks;
    interior_blocks.reserve(dm.num_cells);
    for (int t = 0; t < dm.num_cells; ++t)
      interior_blocks.emplace_back(t * dm.cell_block, dm.cell_block);
    const int n_interior = dm.free_interior_count();
    CondensedSystem cond(sys.matrix, sys.rhs, interior_blocks, n_interior);

    std::vector<std::pair<int, int>> edge_blocks;
    for (const auto& [off, sz] : dm.free_blocks())
      if (off >= n_interior) edge_blocks.emplace_back(off - n_interior, sz);
    BlockJacobi precond(cond.schur(), edge_blocks);
    result.min_block_pivot =
        std::min(cond.min_interior_pivot(), precond.min_pivot());

    auto [x_edge, report] =
        conjugate_gradient(cond.schur(), cond.rhs(), opts.tol, opts.maxit,
                           &precond);
    result.report = report;
    if (!report.ok()) throw_solver_failure(report);
    x_free = cond.recover(x_edge);
  } else {
    BlockJacobi precond(sys.matrix, dm.free_blocks());
    result.min_block_pivot = precond.min_pivot();
    auto [x, report] =
        conjugate_gradient(sys.matrix, sys.rhs, opts.tol, opts.maxit,
                           &precond);
    result.report = report;
    if (!report.ok()) throw_solver_failure(report);
    x_free = std::move(x);
  }
  result.uh = sys.expand(m, x_free);
  return result;
}

Mesh GridFamily::build(int level) const {
  switch (kind) {
    case Kind::perturbed:
      return build_perturbed_grid(level, seed, magnitude);
    case Kind::uniform:
    default:
      return build_uniform_grid(level);
  }
}

std::vector<StudyRow> convergence_study(const ProblemSpec& problem, int k,
                                        const GridFamily& grids, int level_lo,
                                        int level_hi,
                                        const SolveOptions& opts) {
  if (level_lo < 1 || level_hi < level_lo)
    throw ConfigError("bad level range " + std::to_string(level_lo) + ".." +
                      std::to_string(level_hi));
  if (!problem.has_exact())
    throw ConfigError("convergence study needs a problem with an exact "
                      "solution");
  std::vector<StudyRow> rows;
  rows.reserve(level_hi - level_lo + 1);
  for (int level = level_lo; level <= level_hi; ++level) {
    const Mesh mesh = grids.build(level);
    const SolveResult solved = solve_problem(mesh, problem, k, opts);
    const ErrorSummary err = compute_errors(solved.uh, problem, mesh);
    StudyRow row;
    row.level = level;
    row.h = mesh.h;
    row.ndof = solved.free_dofs;
    row.l2_err = err.l2;
    row.energy_err = err.energy;
    row.weighted_energy_err = err.weighted_energy;
    row.h1_err = err.h1;
    row.iterations = solved.report.iterations;
    row.rel_residual = solved.report.rel_residual;
    rows.push_back(row);
  }
  fill_rates(rows);
  return rows;
}

}  // namespace wg
