#include "wg/weak_calculus.hpp"

#include <cmath>
#include <string>

#include "wg/errors.hpp"

namespace wg {

namespace {

void check_order(int k) {
  if (k < 1 || k > kMaxOrder) {
    throw ConfigError("method order k must be in [1, " +
                      std::to_string(kMaxOrder) + "], got " +
                      std::to_string(k));
  }
}

void check_coefficient(const Eigen::Matrix2d& a) {
  if (std::abs(a(0, 1) - a(1, 0)) >
      1e-14 * (1.0 + a.cwiseAbs().maxCoeff()))
    throw ConfigError("coefficient matrix must be symmetric");
  if (!(a(0, 0) > 0.0 && a.determinant() > 0.0))
    throw ConfigError("coefficient matrix must be positive definite");
}

}  // namespace

WeakFunction::WeakFunction(const Mesh& m, int k_) {
  check_order(k_);
  k = k_;
  n0 = (k + 1) * (k + 2) / 2;
  eb = k + 2;
  num_cells = m.num_tris();
  num_edges = m.num_edges();
  coeffs = Eigen::VectorXd::Zero(num_cells * n0 + num_edges * eb);
}

ElementOperators build_element_operators(const Mesh& m, int t, int k,
                                         const Eigen::Matrix2d& a) {
  check_order(k);
  check_coefficient(a);
  const auto v = m.tri_vertices(t);

  ElementOperators ops{.k = k,
                       .tri = t,
                       .n0 = (k + 1) * (k + 2) / 2,
                       .n1 = (k + 2) * (k + 3) / 2,
                       .eb = k + 2,
                       .interior = ElementBasis(k, v[0], v[1], v[2]),
                       .gradspace = ElementBasis(k + 1, v[0], v[1], v[2])};
  const int n0 = ops.n0, n1 = ops.n1, eb = ops.eb;

  const MappedQuadrature quad = map_to_triangle(
      triangle_quadrature(operator_quad_degree(k)), v[0], v[1], v[2]);
  const Eigen::MatrixXd vals0 = ops.interior.values(quad.pts);
  const Eigen::MatrixXd vals1 = ops.gradspace.values(quad.pts);
  Eigen::MatrixXd gx0, gy0, gx1, gy1;
  ops.interior.gradients(quad.pts, gx0, gy0);
  ops.gradspace.gradients(quad.pts, gx1, gy1);

  Eigen::MatrixXd gram1 = Eigen::MatrixXd::Zero(n1, n1);
  Eigen::MatrixXd div_x = Eigen::MatrixXd::Zero(n1, n0);
  Eigen::MatrixXd div_y = Eigen::MatrixXd::Zero(n1, n0);
  ops.interior_grad_gram = Eigen::MatrixXd::Zero(n0, n0);
  for (int q = 0; q < quad.size(); ++q) {
    const double w = quad.wts[q];
    gram1.noalias() += w * vals1.row(q).transpose() * vals1.row(q);
    div_x.noalias() += w * gx1.row(q).transpose() * vals0.row(q);
    div_y.noalias() += w * gy1.row(q).transpose() * vals0.row(q);
    ops.interior_grad_gram.noalias() +=
        w * (gx0.row(q).transpose() * gx0.row(q) +
             gy0.row(q).transpose() * gy0.row(q));
  }

  ops.mass = Eigen::MatrixXd::Zero(2 * n1, 2 * n1);
  ops.mass.topLeftCorner(n1, n1) = gram1;
  ops.mass.bottomRightCorner(n1, n1) = gram1;
  ops.weighted_mass = Eigen::MatrixXd::Zero(2 * n1, 2 * n1);
  ops.weighted_mass.topLeftCorner(n1, n1) = a(0, 0) * gram1;
  ops.weighted_mass.topRightCorner(n1, n1) = a(0, 1) * gram1;
  ops.weighted_mass.bottomLeftCorner(n1, n1) = a(1, 0) * gram1;
  ops.weighted_mass.bottomRightCorner(n1, n1) = a(1, 1) * gram1;

  // Right-hand sides of the defining moments, columns ordered
  // [cell | edge0 | edge1 | edge2].
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(2 * n1, ops.local_dofs());
  rhs.block(0, 0, n1, n0) = -div_x;
  rhs.block(n1, 0, n1, n0) = -div_y;

  const EdgeQuadrature erule = edge_quadrature(operator_quad_degree(k));
  for (int j = 0; j < 3; ++j) {
    const int e = m.tri_edges[t][j];
    ops.edge_basis.emplace_back(k + 1, m.edges[e].length);
    // Trace integrals in the edge's canonical (lower node first)
    // parameterization so both adjacent elements see identical edge DOFs.
    std::vector<Vec2> pts(erule.size());
    for (int q = 0; q < erule.size(); ++q)
      pts[q] = m.edge_point(e, erule.pts[q]);
    const Eigen::MatrixXd tvals = ops.gradspace.values(pts);
    const Eigen::MatrixXd evals = ops.edge_basis[j].values(erule.pts);
    Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(n1, eb);
    for (int q = 0; q < erule.size(); ++q) {
      moments.noalias() += erule.wts[q] * m.edges[e].length *
                           tvals.row(q).transpose() * evals.row(q);
    }
    const Vec2 n = m.tri_normals[t][j];
    rhs.block(0, n0 + j * eb, n1, eb) = n.x * moments;
    rhs.block(n1, n0 + j * eb, n1, eb) = n.y * moments;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(ops.mass);
  if (llt.info() != Eigen::Success)
    throw SolverError("vector mass matrix not positive definite");
  ops.grad_map = llt.solve(rhs);
  return ops;
}

Eigen::VectorXd local_coeffs(const WeakFunction& v, const Mesh& m, int t) {
  Eigen::VectorXd out(v.n0 + 3 * v.eb);
  out.head(v.n0) = v.cell(t);
  for (int j = 0; j < 3; ++j)
    out.segment(v.n0 + j * v.eb, v.eb) = v.edge(m.tri_edges[t][j]);
  return out;
}

Eigen::VectorXd weak_gradient_of_field(const std::function<double(Vec2)>& f,
                                       const Mesh& m, int t,
                                       const ElementOperators& ops,
                                       int quad_degree) {
  const auto v = m.tri_vertices(t);
  const MappedQuadrature quad =
      map_to_triangle(triangle_quadrature(quad_degree), v[0], v[1], v[2]);
  Eigen::MatrixXd gx1, gy1;
  ops.gradspace.gradients(quad.pts, gx1, gy1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * ops.n1);
  for (int q = 0; q < quad.size(); ++q) {
    const double wf = quad.wts[q] * f(quad.pts[q]);
    rhs.head(ops.n1).noalias() -= wf * gx1.row(q).transpose();
    rhs.tail(ops.n1).noalias() -= wf * gy1.row(q).transpose();
  }
  const EdgeQuadrature erule = edge_quadrature(quad_degree);
  for (int j = 0; j < 3; ++j) {
    const int e = m.tri_edges[t][j];
    const Vec2 n = m.tri_normals[t][j];
    std::vector<Vec2> pts(erule.size());
    for (int q = 0; q < erule.size(); ++q)
      pts[q] = m.edge_point(e, erule.pts[q]);
    const Eigen::MatrixXd tvals = ops.gradspace.values(pts);
    for (int q = 0; q < erule.size(); ++q) {
      const double wf = erule.wts[q] * m.edges[e].length * f(pts[q]);
      rhs.head(ops.n1).noalias() += wf * n.x * tvals.row(q).transpose();
      rhs.tail(ops.n1).noalias() += wf * n.y * tvals.row(q).transpose();
    }
  }
  return Eigen::LLT<Eigen::MatrixXd>(ops.mass).solve(rhs);
}

Eigen::VectorXd project_vector_field(const std::function<Vec2(Vec2)>& f,
                                     const ElementBasis& gradspace, Vec2 v0,
                                     Vec2 v1, Vec2 v2, int quad_degree) {
  const Eigen::VectorXd cx = project_onto_element(
      [&f](Vec2 p) { return f(p).x; }, gradspace, v0, v1, v2, quad_degree);
  const Eigen::VectorXd cy = project_onto_element(
      [&f](Vec2 p) { return f(p).y; }, gradspace, v0, v1, v2, quad_degree);
  Eigen::VectorXd out(2 * cx.size());
  out << cx, cy;
  return out;
}

Eigen::MatrixXd eval_vector_field(const ElementBasis& gradspace,
                                  const Eigen::VectorXd& c,
                                  std::span<const Vec2> pts) {
  const int n1 = gradspace.dim();
  const Eigen::MatrixXd vals = gradspace.values(pts);
  Eigen::MatrixXd out(static_cast<int>(pts.size()), 2);
  out.col(0) = vals * c.head(n1);
  out.col(1) = vals * c.tail(n1);
  return out;
}

WeakFunction interpolate(const std::function<double(Vec2)>& u, const Mesh& m,
                         int k, int quad_degree) {
  WeakFunction v(m, k);
  for (int t = 0; t < m.num_tris(); ++t) {
    const auto tv = m.tri_vertices(t);
    const ElementBasis basis(k, tv[0], tv[1], tv[2]);
    v.cell(t) = project_onto_element(u, basis, tv[0], tv[1], tv[2],
                                     quad_degree);
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    const EdgeBasis basis(k + 1, m.edges[e].length);
    v.edge(e) = project_onto_edge(u, basis, m.nodes[m.edges[e].nodes[0]],
                                  m.nodes[m.edges[e].nodes[1]], quad_degree);
  }
  return v;
}

}  // namespace wg
