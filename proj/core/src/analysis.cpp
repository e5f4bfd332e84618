#include "wg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "wg/assembly.hpp"
#include "wg/dof_map.hpp"
#include "wg/errors.hpp"
#include "wg/linsolve.hpp"

namespace wg {

namespace {

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

// (v0 - vb)^2 quadrature form over the element boundary, in local
// [cell | edge0 | edge1 | edge2] coefficients.
Eigen::MatrixXd boundary_jump_form(const Mesh& m, int t,
                                   const ElementOperators& ops,
                                   bool weight_by_inv_h) {
  const int nloc = ops.local_dofs();
  Eigen::MatrixXd form = Eigen::MatrixXd::Zero(nloc, nloc);
  const EdgeQuadrature erule = edge_quadrature(operator_quad_degree(ops.k));
  const double w_h = weight_by_inv_h ? 1.0 / m.tri_diameter[t] : 1.0;
  Eigen::VectorXd r(nloc);
  for (int j = 0; j < 3; ++j) {
    const int e = m.tri_edges[t][j];
    std::vector<Vec2> pts(erule.size());
    for (int q = 0; q < erule.size(); ++q)
      pts[q] = m.edge_point(e, erule.pts[q]);
    const Eigen::MatrixXd vals0 = ops.interior.values(pts);
    const Eigen::MatrixXd valsb = ops.edge_basis[j].values(erule.pts);
    for (int q = 0; q < erule.size(); ++q) {
      r.setZero();
      r.head(ops.n0) = vals0.row(q);
      r.segment(ops.n0 + j * ops.eb, ops.eb) = -valsb.row(q);
      form.noalias() +=
          (w_h * erule.wts[q] * m.edges[e].length) * r * r.transpose();
    }
  }
  return form;
}

// a (grad u - P grad u) . n at the quadrature points of local edge j, where
// P is the element's vector L2 projection (coefficients proj).
Eigen::VectorXd flux_defect(const ProblemSpec& problem, const Mesh& m, int t,
                            int j, const ElementBasis& gradspace,
                            const Eigen::VectorXd& proj,
                            const std::vector<Vec2>& pts) {
  const Vec2 n = m.tri_normals[t][j];
  const Eigen::MatrixXd pvals = eval_vector_field(gradspace, proj, pts);
  Eigen::VectorXd out(static_cast<int>(pts.size()));
  for (size_t q = 0; q < pts.size(); ++q) {
    const Vec2 grad = problem.exact_grad(pts[q]);
    const double dx = grad.x - pvals(q, 0);
    const double dy = grad.y - pvals(q, 1);
    out[q] = (problem.a(0, 0) * dx + problem.a(0, 1) * dy) * n.x +
             (problem.a(1, 0) * dx + problem.a(1, 1) * dy) * n.y;
  }
  return out;
}

}  // namespace

double energy_norm(const WeakFunction& v, const Mesh& m,
                   const Eigen::Matrix2d* a) {
  const Eigen::Matrix2d coef = a ? *a : Eigen::Matrix2d::Identity();
  double acc = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const ElementOperators ops = build_element_operators(m, t, v.k, coef);
    const Eigen::VectorXd g = weak_gradient(ops, local_coeffs(v, m, t));
    acc += g.dot(ops.weighted_mass * g);
  }
  // The quadratic forms are PSD up to roundoff; clamp so an exact zero does
  // not come out as sqrt of a tiny negative.
  return std::sqrt(std::max(0.0, acc));
}

double discrete_h1_norm(const WeakFunction& v, const Mesh& m) {
  const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
  double acc = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const ElementOperators ops = build_element_operators(m, t, v.k, eye);
    const Eigen::VectorXd local = local_coeffs(v, m, t);
    acc += local.head(ops.n0).dot(ops.interior_grad_gram * local.head(ops.n0));
    const Eigen::MatrixXd jump = boundary_jump_form(m, t, ops, true);
    acc += local.dot(jump * local);
  }
  return std::sqrt(std::max(0.0, acc));
}

ErrorSummary compute_errors(const WeakFunction& uh, const ProblemSpec& problem,
                            const Mesh& m, int quad_degree) {
  if (!problem.has_exact())
    throw ConfigError("compute_errors needs a problem with an exact solution");
  const int k = uh.k;
  const int deg = quad_degree > 0 ? quad_degree : data_quad_degree(k);
  WeakFunction e = interpolate(problem.exact, m, k, deg);
  e.coeffs -= uh.coeffs;

  ErrorSummary sum;
  double l2 = 0.0, en = 0.0, wen = 0.0, h1 = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const ElementOperators ops = build_element_operators(m, t, k, problem.a);
    const Eigen::VectorXd local = local_coeffs(e, m, t);
    // The interior basis is L2-orthonormal, so the cell L2 norm is the
    // coefficient norm.
    l2 += local.head(ops.n0).squaredNorm();
    const Eigen::VectorXd g = weak_gradient(ops, local);
    en += g.dot(ops.mass * g);
    wen += g.dot(ops.weighted_mass * g);
    h1 += local.head(ops.n0).dot(ops.interior_grad_gram * local.head(ops.n0));
    h1 += local.dot(boundary_jump_form(m, t, ops, true) * local);
  }
  sum.l2 = std::sqrt(l2);
  sum.energy = std::sqrt(std::max(0.0, en));
  sum.weighted_energy = std::sqrt(std::max(0.0, wen));
  sum.h1 = std::sqrt(std::max(0.0, h1));
  return sum;
}

void fill_rates(std::vector<StudyRow>& rows) {
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i].l2_rate = kQuietNan;
    rows[i].energy_rate = kQuietNan;
    if (i == 0) continue;
    if (rows[i - 1].l2_err > 0.0 && rows[i].l2_err > 0.0)
      rows[i].l2_rate = std::log2(rows[i - 1].l2_err / rows[i].l2_err);
    if (rows[i - 1].energy_err > 0.0 && rows[i].energy_err > 0.0)
      rows[i].energy_rate =
          std::log2(rows[i - 1].energy_err / rows[i].energy_err);
  }
}

namespace {

std::string rate_field(double r) {
  if (std::isnan(r)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", r);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "level,h,ndof,l2_err,l2_rate,energy_err,energy_rate\n";
  char buf[160];
  for (const StudyRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%d,%.6e,%s,%.6e,%s\n", r.level,
                  r.h, r.ndof, r.l2_err, rate_field(r.l2_rate).c_str(),
                  r.energy_err, rate_field(r.energy_rate).c_str());
    out << buf;
  }
}

void write_table(std::ostream& out, const std::vector<StudyRow>& rows) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%5s %10s %8s %12s %6s %12s %6s\n", "level",
                "h", "ndof", "l2_err", "rate", "energy_err", "rate");
  out << buf;
  for (const StudyRow& r : rows) {
    auto rate = [](double v) -> std::string {
      if (std::isnan(v)) return "-";
      char b[32];
      std::snprintf(b, sizeof b, "%.2f", v);
      return b;
    };
    std::snprintf(buf, sizeof buf, "%5d %10.4e %8d %12.4e %6s %12.4e %6s\n",
                  r.level, r.h, r.ndof, r.l2_err, rate(r.l2_rate).c_str(),
                  r.energy_err, rate(r.energy_rate).c_str());
    out << buf;
  }
}

double consistency_functional(const ProblemSpec& problem,
                              const WeakFunction& v, const Mesh& m,
                              int quad_degree) {
  if (!problem.exact_grad)
    throw ConfigError("consistency functional needs the exact gradient");
  const int k = v.k;
  const int deg = quad_degree > 0 ? quad_degree : data_quad_degree(k);
  const EdgeQuadrature erule = edge_quadrature(deg);
  double acc = 0.0;
  for (int t = 0; t < m.num_tris(); ++t) {
    const auto tv = m.tri_vertices(t);
    const ElementBasis interior(k, tv[0], tv[1], tv[2]);
    const ElementBasis gradspace(k + 1, tv[0], tv[1], tv[2]);
    const Eigen::VectorXd proj = project_vector_field(
        problem.exact_grad, gradspace, tv[0], tv[1], tv[2], deg);
    for (int j = 0; j < 3; ++j) {
      const int e = m.tri_edges[t][j];
      std::vector<Vec2> pts(erule.size());
      for (int q = 0; q < erule.size(); ++q)
        pts[q] = m.edge_point(e, erule.pts[q]);
      const Eigen::VectorXd defect =
          flux_defect(problem, m, t, j, gradspace, proj, pts);
      const Eigen::VectorXd v0 = interior.values(pts) * v.cell(t);
      const EdgeBasis ebasis(k + 1, m.edges[e].length);
      const Eigen::VectorXd vb = ebasis.values(erule.pts) * v.edge(e);
      for (int q = 0; q < erule.size(); ++q) {
        acc += erule.wts[q] * m.edges[e].length * defect[q] *
               (v0[q] - vb[q]);
      }
    }
  }
  return acc;
}

double error_equation_residual(const ProblemSpec& problem,
                               const WeakFunction& uh, const Mesh& m) {
  if (!problem.has_exact() || !problem.exact_grad)
    throw ConfigError("error equation check needs exact solution and gradient");
  const int k = uh.k;
  const DofMap dm = build_dof_map(m, k);
  const int deg = data_quad_degree(k);

  WeakFunction e = interpolate(problem.exact, m, k, deg);
  e.coeffs -= uh.coeffs;

  Eigen::VectorXd lhs = Eigen::VectorXd::Zero(dm.free_count);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dm.free_count);
  const EdgeQuadrature erule = edge_quadrature(deg);
  std::vector<int> global(dm.cell_block + 3 * dm.edge_block);
  for (int t = 0; t < m.num_tris(); ++t) {
    const ElementOperators ops = build_element_operators(m, t, k, problem.a);
    for (int i = 0; i < dm.cell_block; ++i) global[i] = dm.cell_offset(t) + i;
    for (int j = 0; j < 3; ++j) {
      const int off = dm.edge_offset(m.tri_edges[t][j]);
      for (int i = 0; i < dm.edge_block; ++i)
        global[dm.cell_block + j * dm.edge_block + i] = off + i;
    }

    const Eigen::VectorXd r_loc = local_stiffness(ops) * local_coeffs(e, m, t);
    Eigen::VectorXd l_loc = Eigen::VectorXd::Zero(ops.local_dofs());
    const Eigen::VectorXd proj =
        project_vector_field(problem.exact_grad, ops.gradspace,
                             m.tri_vertices(t)[0], m.tri_vertices(t)[1],
                             m.tri_vertices(t)[2], deg);
    for (int j = 0; j < 3; ++j) {
      const int eidx = m.tri_edges[t][j];
      std::vector<Vec2> pts(erule.size());
      for (int q = 0; q < erule.size(); ++q)
        pts[q] = m.edge_point(eidx, erule.pts[q]);
      const Eigen::VectorXd defect =
          flux_defect(problem, m, t, j, ops.gradspace, proj, pts);
      const Eigen::MatrixXd vals0 = ops.interior.values(pts);
      const Eigen::MatrixXd valsb = ops.edge_basis[j].values(erule.pts);
      for (int q = 0; q < erule.size(); ++q) {
        const double w = erule.wts[q] * m.edges[eidx].length * defect[q];
        l_loc.head(ops.n0).noalias() += w * vals0.row(q).transpose();
        l_loc.segment(ops.n0 + j * ops.eb, ops.eb).noalias() -=
            w * valsb.row(q).transpose();
      }
    }
    for (int i = 0; i < ops.local_dofs(); ++i) {
      const int fi = dm.to_free[global[i]];
      if (fi >= 0) {
        lhs[fi] += r_loc[i];
        rhs[fi] += l_loc[i];
      }
    }
  }
  const double scale = std::max(
      {lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff(), 1e-300});
  return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

NormEquivalenceReport verify_norm_equivalence(const Mesh& m, int k,
                                              const Eigen::Matrix2d& a) {
  const DofMap dm = build_dof_map(m, k);
  if (dm.free_count > 2000) {
    throw ConfigError("norm equivalence verification is dense; " +
                      std::to_string(dm.free_count) +
                      " free DOFs exceed the 2000 limit");
  }
  const int n = dm.free_count;
  Eigen::MatrixXd g_energy = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd g_weighted = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd g_h1 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd g_jump = Eigen::MatrixXd::Zero(n, n);

  std::vector<int> global(dm.cell_block + 3 * dm.edge_block);
  for (int t = 0; t < m.num_tris(); ++t) {
    const ElementOperators ops = build_element_operators(m, t, k, a);
    for (int i = 0; i < dm.cell_block; ++i) global[i] = dm.cell_offset(t) + i;
    for (int j = 0; j < 3; ++j) {
      const int off = dm.edge_offset(m.tri_edges[t][j]);
      for (int i = 0; i < dm.edge_block; ++i)
        global[dm.cell_block + j * dm.edge_block + i] = off + i;
    }
    const Eigen::MatrixXd a_energy =
        ops.grad_map.transpose() * ops.mass * ops.grad_map;
    const Eigen::MatrixXd a_weighted =
        ops.grad_map.transpose() * ops.weighted_mass * ops.grad_map;
    const Eigen::MatrixXd jump = boundary_jump_form(m, t, ops, true);
    const int nloc = ops.local_dofs();
    for (int i = 0; i < nloc; ++i) {
      const int fi = dm.to_free[global[i]];
      if (fi < 0) continue;
      for (int j = 0; j < nloc; ++j) {
        const int fj = dm.to_free[global[j]];
        if (fj < 0) continue;
        g_energy(fi, fj) += a_energy(i, j);
        g_weighted(fi, fj) += a_weighted(i, j);
        g_jump(fi, fj) += jump(i, j);
        if (i < ops.n0 && j < ops.n0)
          g_h1(fi, fj) += ops.interior_grad_gram(i, j);
      }
    }
  }
  g_h1 += g_jump;

  NormEquivalenceReport rep;
  rep.k = k;
  rep.free_dofs = n;
  {
    const Eigen::VectorXd lam = dense_sym_eig(g_weighted, &g_energy).first;
    rep.alpha = std::sqrt(std::max(0.0, lam.minCoeff()));
    rep.beta = std::sqrt(std::max(0.0, lam.maxCoeff()));
  }
  {
    const Eigen::VectorXd lam = dense_sym_eig(g_energy, &g_h1).first;
    rep.min_energy_eig = lam.minCoeff();
    rep.c_lower = std::sqrt(std::max(0.0, lam.minCoeff()));
    rep.c_upper = std::sqrt(std::max(0.0, lam.maxCoeff()));
  }
  {
    const Eigen::VectorXd lam = dense_sym_eig(g_jump, &g_energy).first;
    rep.c_jump = std::sqrt(std::max(0.0, lam.maxCoeff()));
  }
  return rep;
}

namespace {

struct PatchConstants {
  double interface_c = 0.0;
  double jump_c = 0.0;
  double min_energy = 0.0;
  double h = 0.0;
};

PatchConstants patch_constants(const Mesh& patch, int k) {
  const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
  WeakFunction proto(patch, k);
  const int n = proto.size();
  const int n0 = proto.n0, eb = proto.eb;

  Eigen::MatrixXd energy = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd l_interface = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd l_jump = Eigen::MatrixXd::Zero(n, n);

  std::vector<ElementOperators> ops;
  ops.reserve(patch.num_tris());
  for (int t = 0; t < patch.num_tris(); ++t)
    ops.push_back(build_element_operators(patch, t, k, eye));

  std::vector<int> global(n0 + 3 * eb);
  for (int t = 0; t < patch.num_tris(); ++t) {
    for (int i = 0; i < n0; ++i) global[i] = t * n0 + i;
    for (int j = 0; j < 3; ++j) {
      const int off = proto.edge_offset(patch.tri_edges[t][j]);
      for (int i = 0; i < eb; ++i) global[n0 + j * eb + i] = off + i;
    }
    const Eigen::MatrixXd a_loc =
        ops[t].grad_map.transpose() * ops[t].mass * ops[t].grad_map;
    const Eigen::MatrixXd jump = boundary_jump_form(patch, t, ops[t], false);
    for (int i = 0; i < n0 + 3 * eb; ++i)
      for (int j = 0; j < n0 + 3 * eb; ++j) {
        energy(global[i], global[j]) += a_loc(i, j);
        l_jump(global[i], global[j]) += jump(i, j);
      }
  }

  // The one interior edge carries the cell-cell trace jump form.
  int shared = -1;
  for (int e = 0; e < patch.num_edges(); ++e)
    if (!patch.edges[e].boundary) shared = e;
  if (shared < 0) throw ConfigError("patch has no shared edge");
  {
    const EdgeQuadrature erule = edge_quadrature(operator_quad_degree(k));
    std::vector<Vec2> pts(erule.size());
    for (int q = 0; q < erule.size(); ++q)
      pts[q] = patch.edge_point(shared, erule.pts[q]);
    const int t0 = patch.edges[shared].tris[0];
    const int t1 = patch.edges[shared].tris[1];
    const Eigen::MatrixXd v0 = ops[t0].interior.values(pts);
    const Eigen::MatrixXd v1 = ops[t1].interior.values(pts);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (int q = 0; q < erule.size(); ++q) {
      r.setZero();
      r.segment(t0 * n0, n0) = v0.row(q);
      r.segment(t1 * n0, n0) -= v1.row(q);
      l_interface.noalias() += (erule.wts[q] * patch.edges[shared].length) *
                               r * r.transpose();
    }
  }

  // Deflate the global constant (the energy kernel) and compare forms on its
  // orthogonal complement.
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(n);
  for (int t = 0; t < patch.num_tris(); ++t) {
    const auto tv = patch.tri_vertices(t);
    ones.segment(t * n0, n0) = project_onto_element(
        [](Vec2) { return 1.0; }, ops[t].interior, tv[0], tv[1], tv[2],
        operator_quad_degree(k));
  }
  for (int e = 0; e < patch.num_edges(); ++e) {
    const EdgeBasis ebasis(k + 1, patch.edges[e].length);
    ones.segment(proto.edge_offset(e), eb) = project_onto_edge(
        [](Vec2) { return 1.0; }, ebasis, patch.nodes[patch.edges[e].nodes[0]],
        patch.nodes[patch.edges[e].nodes[1]], operator_quad_degree(k));
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(n - 1);

  const Eigen::MatrixXd energy_z = z.transpose() * energy * z;
  const Eigen::MatrixXd l_if_z = z.transpose() * l_interface * z;
  const Eigen::MatrixXd l_jp_z = z.transpose() * l_jump * z;

  PatchConstants out;
  out.h = patch.h;
  out.min_energy = dense_sym_eig(energy_z).first.minCoeff();
  out.interface_c = dense_sym_eig(l_if_z, &energy_z).first.maxCoeff() / patch.h;
  out.jump_c = dense_sym_eig(l_jp_z, &energy_z).first.maxCoeff() / patch.h;
  return out;
}

Mesh build_patch(Vec2 apex, double scale) {
  std::vector<Vec2> nodes = {{0.0, 0.0}, {scale, 0.0}, {0.0, scale},
                             {scale * apex.x, scale * apex.y}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 3, 1}};
  return make_mesh(std::move(nodes), std::move(tris));
}

}  // namespace

PatchLemmaReport verify_patch_lemmas(int k, Vec2 apex) {
  if (!(apex.y < 0.0))
    throw ConfigError("patch apex must lie below the shared edge (y < 0)");
  const PatchConstants unit = patch_constants(build_patch(apex, 1.0), k);
  const PatchConstants quarter = patch_constants(build_patch(apex, 0.25), k);

  PatchLemmaReport rep;
  rep.k = k;
  rep.h = unit.h;
  rep.interface_constant = unit.interface_c;
  rep.boundary_jump_constant = unit.jump_c;
  rep.min_energy_eigenvalue = unit.min_energy;
  rep.scaling_defect =
      std::max(std::abs(quarter.interface_c / unit.interface_c - 1.0),
               std::abs(quarter.jump_c / unit.jump_c - 1.0));
  return rep;
}

}  // namespace wg
