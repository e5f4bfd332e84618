// Microbenchmarks for the hot paths: per-element operator construction,
// global assembly, and the preconditioned CG solve.

#include <benchmark/benchmark.h>

#include "wg/assembly.hpp"
#include "wg/dof_map.hpp"
#include "wg/linsolve.hpp"
#include "wg/mesh.hpp"
#include "wg/problem.hpp"
#include "wg/weak_calculus.hpp"

namespace {

using namespace wg;

void BM_ElementOperators(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Mesh m = build_uniform_grid(3);
  const ProblemSpec p = make_problem("example2");
  int t = 0;
  for (auto _ : state) {
    const ElementOperators ops =
        build_element_operators(m, t, k, p.a);
    benchmark::DoNotOptimize(ops.grad_map.data());
    t = (t + 1) % m.num_tris();
  }
}
BENCHMARK(BM_ElementOperators)->DenseRange(1, 4)->Unit(benchmark::kMicrosecond);

void BM_AssembleSystem(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Mesh m = build_uniform_grid(level);
  const ProblemSpec p = make_problem("example1");
  for (auto _ : state) {
    const AssembledSystem sys = assemble_system(m, p, k);
    benchmark::DoNotOptimize(sys.rhs.data());
  }
  state.counters["free_dofs"] =
      static_cast<double>(build_dof_map(m, k).free_count);
}
BENCHMARK(BM_AssembleSystem)
    ->Args({4, 1})
    ->Args({5, 1})
    ->Args({4, 2})
    ->Args({4, 3})
    ->Unit(benchmark::kMillisecond);

void BM_ConjugateGradient(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Mesh m = build_uniform_grid(level);
  const ProblemSpec p = make_problem("example1");
  const AssembledSystem sys = assemble_system(m, p, k);
  const BlockJacobi precond(sys.matrix, sys.dofs.free_blocks());
  int iterations = 0;
  for (auto _ : state) {
    auto [x, report] =
        conjugate_gradient(sys.matrix, sys.rhs, 1e-12, 0, &precond);
    benchmark::DoNotOptimize(x.data());
    iterations = report.iterations;
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_ConjugateGradient)
    ->Args({4, 1})
    ->Args({5, 1})
    ->Args({4, 2})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
