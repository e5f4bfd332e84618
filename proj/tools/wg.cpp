// wg: stabilizer-free weak Galerkin solver for 2D elliptic Dirichlet
// problems on the unit square.
//
//   wg meshgen     write a mesh of the uniform or perturbed family
//   wg solve       solve one problem on one grid and report errors
//   wg convergence run a refinement study and tabulate rates
//   wg verify      run the numerical verification suites
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 solver
// failure, 4 verification failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wg/analysis.hpp"
#include "wg/driver.hpp"
#include "wg/errors.hpp"
#include "wg/mesh_io.hpp"
#include "wg/problem.hpp"
#include "wg/weak_calculus.hpp"

namespace {

using namespace wg;

struct CommonOptions {
  std::string problem = "example1";
  int k = 1;
  std::string grid = "uniform";
  std::string mesh_path;
  int level = 3;
  std::string levels;  // "A..B"
  std::uint64_t seed = 1;
  double magnitude = 0.2;
  double tol = 1e-12;
  int maxit = 0;
  bool condense = false;
  bool homogeneous = false;
  std::string out;
  std::string format = "table";
};

std::pair<int, int> parse_level_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos || sep == 0 || sep + 2 >= text.size())
    throw ConfigError("bad level range '" + text + "', expected A..B");
  int lo = 0, hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stoi(text.substr(0, sep), &used);
    if (used != sep) throw std::invalid_argument(text);
    const std::string tail = text.substr(sep + 2);
    hi = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError("bad level range '" + text + "', expected A..B");
  }
  if (hi < lo) throw ConfigError("empty level range '" + text + "'");
  return {lo, hi};
}

GridFamily make_family(const CommonOptions& opt) {
  GridFamily family;
  if (opt.grid == "perturbed") {
    family.kind = GridFamily::Kind::perturbed;
    family.seed = opt.seed;
    family.magnitude = opt.magnitude;
  }
  return family;
}

Mesh make_single_mesh(const CommonOptions& opt) {
  if (opt.grid == "file") {
    if (opt.mesh_path.empty())
      throw ConfigError("--grid file needs --mesh PATH");
    return read_mesh_file(opt.mesh_path);
  }
  return make_family(opt).build(opt.level);
}

ProblemSpec make_configured_problem(const CommonOptions& opt) {
  ProblemSpec p = make_problem(opt.problem);
  if (opt.homogeneous) {
    p.f = [](Vec2) { return 0.0; };
    p.g = [](Vec2) { return 0.0; };
    p.exact = [](Vec2) { return 0.0; };
    p.exact_grad = [](Vec2) { return Vec2{0.0, 0.0}; };
  }
  return p;
}

SolveOptions make_solve_options(const CommonOptions& opt) {
  SolveOptions sopt;
  sopt.tol = opt.tol;
  sopt.maxit = opt.maxit;
  sopt.condense = opt.condense;
  return sopt;
}

// Writes to the --out path when given, otherwise to stdout.
void emit(const CommonOptions& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(opt.out);
  if (!file) throw IoError("cannot open '" + opt.out + "' for writing");
  file << text;
  if (!file.flush()) throw IoError("write to '" + opt.out + "' failed");
}

int run_meshgen(const CommonOptions& opt) {
  if (opt.grid == "file")
    throw ConfigError("meshgen generates meshes; --grid must be uniform or "
                      "perturbed");
  const Mesh m = make_family(opt).build(opt.level);
  std::ostringstream text;
  write_mesh(text, m);
  emit(opt, text.str());
  return 0;
}

int run_solve(const CommonOptions& opt) {
  const ProblemSpec p = make_configured_problem(opt);
  const Mesh m = make_single_mesh(opt);
  const SolveResult sol = solve_problem(m, p, opt.k, make_solve_options(opt));

  std::ostringstream text;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "problem %s\nk %d\nfree_dofs %d\niterations %d\n"
                "rel_residual %.3e\nmin_block_pivot %.6e\nmax_abs_coeff %.6e\n",
                p.name.c_str(), opt.k, sol.free_dofs, sol.report.iterations,
                sol.report.rel_residual, sol.min_block_pivot,
                sol.uh.coeffs.size() > 0 ? sol.uh.coeffs.cwiseAbs().maxCoeff()
                                         : 0.0);
  text << buf;

  if (p.has_exact()) {
    const ErrorSummary err = compute_errors(sol.uh, p, m);
    std::vector<StudyRow> rows(1);
    rows[0].level = opt.grid == "file" ? 0 : opt.level;
    rows[0].h = m.h;
    rows[0].ndof = sol.free_dofs;
    rows[0].l2_err = err.l2;
    rows[0].energy_err = err.energy;
    rows[0].weighted_energy_err = err.weighted_energy;
    rows[0].h1_err = err.h1;
    fill_rates(rows);
    if (opt.format == "csv")
      write_csv(text, rows);
    else
      write_table(text, rows);
  }
  emit(opt, text.str());
  return 0;
}

int run_convergence(const CommonOptions& opt) {
  if (opt.grid == "file")
    throw ConfigError("a fixed mesh file cannot form a refinement family; "
                      "use --grid uniform or perturbed");
  if (opt.levels.empty())
    throw ConfigError("convergence needs --levels A..B with at least two "
                      "levels");
  const auto [lo, hi] = parse_level_range(opt.levels);
  if (hi == lo)
    throw ConfigError("convergence needs at least two levels, got " +
                      opt.levels);
  const ProblemSpec p = make_configured_problem(opt);
  const auto rows = convergence_study(p, opt.k, make_family(opt), lo, hi,
                                      make_solve_options(opt));
  std::ostringstream text;
  if (opt.format == "csv")
    write_csv(text, rows);
  else
    write_table(text, rows);
  emit(opt, text.str());
  return 0;
}

// --- verification suites ---------------------------------------------------

struct SuiteReport {
  std::ostringstream text;
  std::string first_failure;
  int checked = 0;

  void require(bool ok, const std::string& name, const std::string& detail) {
    ++checked;
    text << (ok ? "ok " : "fail ") << name;
    if (!detail.empty()) text << ' ' << detail;
    text << '\n';
    if (!ok && first_failure.empty()) first_failure = name;
  }
};

Mesh random_element(std::mt19937& gen) {
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> size(0.2, 1.5);
  for (;;) {
    const Vec2 a{pos(gen), pos(gen)};
    const double s = size(gen);
    const Vec2 b = a + Vec2{s * (1.0 + 0.3 * pos(gen)), s * 0.3 * pos(gen)};
    const Vec2 c = a + Vec2{s * 0.3 * pos(gen), s * (1.0 + 0.3 * pos(gen))};
    if (cross(b - a, c - a) < 0.05 * s * s) continue;
    Mesh m = make_mesh_unchecked({a, b, c}, {{0, 1, 2}});
    if (validate(m).ok()) return m;
  }
}

// Largest commuting-identity defect over random elements and random
// polynomials of the gradient-space degree, for both the interpolant route
// and the trace route.
std::pair<double, double> commuting_defect(int k, int trials,
                                           std::mt19937& gen) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double worst_interp = 0.0, worst_field = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Mesh m = random_element(gen);
    const ElementOperators ops =
        build_element_operators(m, 0, k, Eigen::Matrix2d::Identity());

    std::vector<double> cs;
    for (int d = 0; d <= k + 1; ++d)
      for (int a = d; a >= 0; --a) cs.push_back(coef(gen));
    auto phi = [&cs, k](Vec2 p) {
      double v = 0.0;
      int idx = 0;
      for (int d = 0; d <= k + 1; ++d)
        for (int a = d; a >= 0; --a)
          v += cs[idx++] * std::pow(p.x, a) * std::pow(p.y, d - a);
      return v;
    };
    auto grad_phi = [&cs, k](Vec2 p) {
      Vec2 g{0.0, 0.0};
      int idx = 0;
      for (int d = 0; d <= k + 1; ++d)
        for (int a = d; a >= 0; --a) {
          const int b = d - a;
          if (a > 0)
            g.x += cs[idx] * a * std::pow(p.x, a - 1) * std::pow(p.y, b);
          if (b > 0)
            g.y += cs[idx] * b * std::pow(p.x, a) * std::pow(p.y, b - 1);
          ++idx;
        }
      return g;
    };

    const int deg = data_quad_degree(k);
    const auto tv = m.tri_vertices(0);
    const Eigen::VectorXd projected = project_vector_field(
        grad_phi, ops.gradspace, tv[0], tv[1], tv[2], deg);
    const double scale =
        std::max(1.0, projected.cwiseAbs().maxCoeff());

    const WeakFunction qh = interpolate(phi, m, k, deg);
    const Eigen::VectorXd through_interp =
        weak_gradient(ops, local_coeffs(qh, m, 0));
    worst_interp = std::max(
        worst_interp,
        (through_interp - projected).cwiseAbs().maxCoeff() / scale);

    const Eigen::VectorXd through_trace =
        weak_gradient_of_field(phi, m, 0, ops, deg);
    worst_field = std::max(
        worst_field,
        (through_trace - projected).cwiseAbs().maxCoeff() / scale);
  }
  return {worst_interp, worst_field};
}

void suite_identities(const CommonOptions& opt, SuiteReport& report) {
  constexpr double kTol = 1e-10;
  constexpr int kTrials = 50;
  std::mt19937 gen(static_cast<unsigned>(opt.seed));
  std::vector<int> orders;
  if (opt.k > 0)
    orders.push_back(opt.k);
  else
    orders = {1, 2, 3, 4};
  for (const int k : orders) {
    const auto [interp, field] = commuting_defect(k, kTrials, gen);
    char buf[128];
    std::snprintf(buf, sizeof buf, "k=%d max=%.3e tol=%.0e", k, interp, kTol);
    report.require(interp <= kTol, "commuting-identity-interpolant", buf);
    std::snprintf(buf, sizeof buf, "k=%d max=%.3e tol=%.0e", k, field, kTol);
    report.require(field <= kTol, "commuting-identity-trace", buf);
  }
}

void suite_wellposed(const CommonOptions& opt, SuiteReport& report) {
  const ProblemSpec p = make_configured_problem(opt);
  const Mesh m = make_single_mesh(opt);
  const SolveResult sol = solve_problem(m, p, opt.k, make_solve_options(opt));
  char buf[160];
  std::snprintf(buf, sizeof buf, "k=%d free_dofs=%d iterations=%d", opt.k,
                sol.free_dofs, sol.report.iterations);
  report.require(sol.report.ok(), "cg-converged-without-breakdown", buf);
  std::snprintf(buf, sizeof buf, "min_pivot=%.6e", sol.min_block_pivot);
  report.require(sol.min_block_pivot > 0.0, "block-cholesky-positive", buf);
}

void suite_error_equation(const CommonOptions& opt, SuiteReport& report) {
  constexpr double kTol = 1e-8;
  CommonOptions cfg = opt;
  cfg.tol = 1e-14;  // identity check needs the solver error out of the way
  const ProblemSpec p = make_configured_problem(cfg);
  const Mesh m = make_single_mesh(cfg);
  const SolveResult sol = solve_problem(m, p, cfg.k, make_solve_options(cfg));
  const double residual = error_equation_residual(p, sol.uh, m);
  char buf[128];
  std::snprintf(buf, sizeof buf, "problem=%s k=%d level=%d residual=%.3e "
                "tol=%.0e", p.name.c_str(), cfg.k, cfg.level, residual, kTol);
  report.require(residual <= kTol, "error-equation-residual", buf);
}

void suite_lemmas(const CommonOptions& opt, SuiteReport& report) {
  const ProblemSpec p = make_problem(opt.problem);
  int lo = 1, hi = 3;
  if (!opt.levels.empty()) std::tie(lo, hi) = parse_level_range(opt.levels);
  std::vector<int> orders;
  if (opt.k > 0)
    orders.push_back(opt.k);
  else
    orders = {1, 2};
  for (const int k : orders) {
    NormEquivalenceReport prev{};
    for (int level = lo; level <= hi; ++level) {
      const auto rep = verify_norm_equivalence(build_uniform_grid(level), k,
                                               p.a);
      char buf[240];
      std::snprintf(buf, sizeof buf,
                    "k=%d level=%d alpha=%.4f beta=%.4f c_lower=%.4f "
                    "c_upper=%.4f c_jump=%.4f",
                    k, level, rep.alpha, rep.beta, rep.c_lower, rep.c_upper,
                    rep.c_jump);
      const bool positive = rep.alpha > 0.0 && rep.beta > 0.0 &&
                            rep.c_lower > 0.0 && rep.c_upper > 0.0 &&
                            rep.c_jump > 0.0 && std::isfinite(rep.beta) &&
                            std::isfinite(rep.c_upper) &&
                            std::isfinite(rep.c_jump);
      report.require(positive, "equivalence-constants-positive", buf);
      std::snprintf(buf, sizeof buf, "k=%d level=%d min_eig=%.6e", k, level,
                    rep.min_energy_eig);
      report.require(rep.min_energy_eig > 0.0, "norm-kernel-trivial", buf);
      if (level > lo) {
        std::snprintf(buf, sizeof buf,
                      "k=%d levels=%d..%d dalpha=%.1f%% dc_lower=%.1f%% "
                      "dc_jump=%.1f%%",
                      k, level - 1, level,
                      100.0 * std::abs(rep.alpha - prev.alpha) / rep.alpha,
                      100.0 * std::abs(rep.c_lower - prev.c_lower) /
                          rep.c_lower,
                      100.0 * std::abs(rep.c_jump - prev.c_jump) /
                          rep.c_jump);
        report.text << "info constant-variation " << buf << '\n';
      }
      prev = rep;
    }
  }
}

void suite_patches(const CommonOptions& opt, SuiteReport& report) {
  std::vector<int> orders;
  if (opt.k > 0)
    orders.push_back(opt.k);
  else
    orders = {1, 2, 3, 4};
  for (const int k : orders) {
    const PatchLemmaReport rep = verify_patch_lemmas(k);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "k=%d interface=%.6f boundary=%.6f min_eig=%.6f", k,
                  rep.interface_constant, rep.boundary_jump_constant,
                  rep.min_energy_eigenvalue);
    const bool finite = std::isfinite(rep.interface_constant) &&
                        std::isfinite(rep.boundary_jump_constant) &&
                        rep.interface_constant > 0.0 &&
                        rep.boundary_jump_constant > 0.0 &&
                        rep.min_energy_eigenvalue > 0.0;
    report.require(finite, "patch-constants-finite", buf);
    std::snprintf(buf, sizeof buf, "k=%d defect=%.3e tol=5%%", k,
                  rep.scaling_defect);
    report.require(rep.scaling_defect <= 0.05, "patch-constant-h-scaling",
                   buf);
  }
}

int run_verify(const CommonOptions& opt, const std::string& suite) {
  SuiteReport report;
  report.text << "suite " << suite << '\n';
  if (suite == "identities")
    suite_identities(opt, report);
  else if (suite == "wellposed")
    suite_wellposed(opt, report);
  else if (suite == "error-equation")
    suite_error_equation(opt, report);
  else if (suite == "lemmas")
    suite_lemmas(opt, report);
  else if (suite == "patches")
    suite_patches(opt, report);
  else
    throw ConfigError("unknown suite '" + suite + "'");

  const bool pass = report.first_failure.empty();
  report.text << "checked " << report.checked << '\n'
              << "result " << (pass ? "pass" : "fail") << '\n';
  emit(opt, report.text.str());
  if (!pass)
    throw VerifyError("suite '" + suite + "' failed at property '" +
                      report.first_failure + "'");
  return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_levels) {
  cmd->add_option("--problem", opt.problem,
                  "Built-in problem: example1|example2|example3");
  cmd->add_option("--k", opt.k, "Method order (1..4)");
  cmd->add_option("--grid", opt.grid, "Grid family")
      ->check(CLI::IsMember({"uniform", "perturbed", "file"}));
  cmd->add_option("--mesh", opt.mesh_path, "Mesh file for --grid file");
  cmd->add_option("--level", opt.level, "Refinement level");
  if (with_levels)
    cmd->add_option("--levels", opt.levels, "Level range A..B");
  cmd->add_option("--seed", opt.seed, "Seed for the perturbed family");
  cmd->add_option("--magnitude", opt.magnitude,
                  "Perturbation magnitude in [0, 0.3]");
  cmd->add_option("--tol", opt.tol, "Solver relative residual tolerance");
  cmd->add_option("--maxit", opt.maxit, "Solver iteration cap (0 = auto)");
  cmd->add_flag("--condense", opt.condense,
                "Solve the statically condensed edge system");
  cmd->add_flag("--homogeneous", opt.homogeneous,
                "Zero out the source and boundary data");
  cmd->add_option("--out", opt.out, "Output path (default: stdout)");
  cmd->add_option("--format", opt.format, "Study output format")
      ->check(CLI::IsMember({"csv", "table"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizer-free weak Galerkin solver on the unit square"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file");

  CommonOptions meshgen_opt, solve_opt, conv_opt, verify_opt;
  std::string suite;

  CLI::App* meshgen = app.add_subcommand("meshgen", "Write a mesh file");
  add_common_flags(meshgen, meshgen_opt, false);

  CLI::App* solve = app.add_subcommand("solve", "Solve one problem");
  add_common_flags(solve, solve_opt, false);

  CLI::App* conv =
      app.add_subcommand("convergence", "Refinement study with rates");
  add_common_flags(conv, conv_opt, true);

  CLI::App* verify = app.add_subcommand("verify", "Numerical verification");
  add_common_flags(verify, verify_opt, true);
  verify->add_option("--suite", suite, "Verification suite")
      ->required()
      ->check(CLI::IsMember(
          {"identities", "wellposed", "error-equation", "lemmas", "patches"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (meshgen->parsed()) {
      code = run_meshgen(meshgen_opt);
    } else if (solve->parsed()) {
      code = run_solve(solve_opt);
    } else if (conv->parsed()) {
      code = run_convergence(conv_opt);
    } else if (verify->parsed()) {
      // Suite defaults differ from the solve defaults.
      if (suite == "error-equation") {
        if (verify->count("--problem") == 0) verify_opt.problem = "example2";
        if (verify->count("--k") == 0) verify_opt.k = 2;
      }
      if ((suite == "identities" || suite == "lemmas" ||
           suite == "patches") &&
          verify->count("--k") == 0)
        verify_opt.k = 0;  // sweep the suite's default orders
      if (suite == "lemmas" && verify->count("--problem") == 0)
        verify_opt.problem = "example2";
      code = run_verify(verify_opt, suite);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const VerifyError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::fprintf(stderr, "elapsed_seconds %.3f\n", seconds);
  return code;
}
