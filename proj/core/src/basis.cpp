#include "wg/basis.hpp"

#include <cmath>
#include <string>

#include "wg/errors.hpp"

namespace wg {

namespace {

void check_element_degree(int degree) {
  if (degree < 0 || degree > kMaxElementDegree) {
    throw ConfigError("element basis degree must be in [0, " +
                      std::to_string(kMaxElementDegree) + "], got " +
                      std::to_string(degree));
  }
}

}  // namespace

ElementBasis::ElementBasis(int degree, Vec2 v0, Vec2 v1, Vec2 v2,
                           bool orthonormalize)
    : degree_(degree) {
  check_element_degree(degree);
  centroid_ = (1.0 / 3.0) * (v0 + v1 + v2);
  scale_ = std::max({norm(v1 - v0), norm(v2 - v1), norm(v0 - v2)});
  if (!(scale_ > 0.0)) throw ConfigError("degenerate element (zero diameter)");
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) exponents_.emplace_back(a, d - a);

  const int n = dim();
  transform_ = Eigen::MatrixXd::Identity(n, n);
  if (!orthonormalize) return;

  const MappedQuadrature quad =
      map_to_triangle(triangle_quadrature(2 * degree), v0, v1, v2);
  const Eigen::MatrixXd mono = monomial_values(quad.pts);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < quad.size(); ++q)
    gram.noalias() += quad.wts[q] * mono.row(q).transpose() * mono.row(q);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SolverError("element Gram matrix not positive definite");
  transform_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd ElementBasis::monomial_values(
    std::span<const Vec2> pts) const {
  const int np = static_cast<int>(pts.size());
  Eigen::MatrixXd out(np, dim());
  std::vector<double> px(degree_ + 1), py(degree_ + 1);
  for (int q = 0; q < np; ++q) {
    const double tx = (pts[q].x - centroid_.x) / scale_;
    const double ty = (pts[q].y - centroid_.y) / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
      px[d] = px[d - 1] * tx;
      py[d] = py[d - 1] * ty;
    }
    for (int i = 0; i < dim(); ++i)
      out(q, i) = px[exponents_[i].first] * py[exponents_[i].second];
  }
  return out;
}

Eigen::MatrixXd ElementBasis::values(std::span<const Vec2> pts) const {
  return monomial_values(pts) * transform_.transpose();
}

void ElementBasis::gradients(std::span<const Vec2> pts, Eigen::MatrixXd& ddx,
                             Eigen::MatrixXd& ddy) const {
  const int np = static_cast<int>(pts.size());
  Eigen::MatrixXd mx(np, dim()), my(np, dim());
  std::vector<double> px(degree_ + 1), py(degree_ + 1);
  for (int q = 0; q < np; ++q) {
    const double tx = (pts[q].x - centroid_.x) / scale_;
    const double ty = (pts[q].y - centroid_.y) / scale_;
    px[0] = py[0] = 1.0;
    for (int d = 1; d <= degree_; ++d) {
      px[d] = px[d - 1] * tx;
      py[d] = py[d - 1] * ty;
    }
    for (int i = 0; i < dim(); ++i) {
      const auto [a, b] = exponents_[i];
      mx(q, i) = a > 0 ? a / scale_ * px[a - 1] * py[b] : 0.0;
      my(q, i) = b > 0 ? b / scale_ * px[a] * py[b - 1] : 0.0;
    }
  }
  ddx = mx * transform_.transpose();
  ddy = my * transform_.transpose();
}

double ElementBasis::eval(int i, Vec2 p) const {
  const Vec2 pt[1] = {p};
  return values(std::span<const Vec2>(pt, 1))(0, i);
}

EdgeBasis::EdgeBasis(int degree, double length)
    : degree_(degree), length_(length) {
  if (degree < 0 || degree > kMaxElementDegree + 1)
    throw ConfigError("edge basis degree out of range");
  if (!(length > 0.0)) throw ConfigError("edge basis needs positive length");
}

Eigen::MatrixXd EdgeBasis::values(std::span<const double> s) const {
  const int np = static_cast<int>(s.size());
  Eigen::MatrixXd out(np, dim());
  for (int q = 0; q < np; ++q) {
    const double x = 2.0 * s[q] - 1.0;
    double pm1 = 1.0, p = x;
    out(q, 0) = 1.0;
    if (degree_ >= 1) out(q, 1) = std::sqrt(3.0) * x;
    for (int j = 2; j <= degree_; ++j) {
      const double pj = ((2.0 * j - 1.0) * x * p - (j - 1.0) * pm1) / j;
      out(q, j) = std::sqrt(2.0 * j + 1.0) * pj;
      pm1 = p;
      p = pj;
    }
  }
  return out;
}

double EdgeBasis::eval(int j, double s) const {
  const double pt[1] = {s};
  return values(std::span<const double>(pt, 1))(0, j);
}

Eigen::VectorXd project_onto_element(const std::function<double(Vec2)>& f,
                                     const ElementBasis& basis, Vec2 v0,
                                     Vec2 v1, Vec2 v2, int quad_degree) {
  const int deg = std::max(quad_degree, 2 * basis.degree());
  const MappedQuadrature quad =
      map_to_triangle(triangle_quadrature(deg), v0, v1, v2);
  const Eigen::MatrixXd vals = basis.values(quad.pts);
  const int n = basis.dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < quad.size(); ++q) {
    gram.noalias() += quad.wts[q] * vals.row(q).transpose() * vals.row(q);
    rhs.noalias() += quad.wts[q] * f(quad.pts[q]) * vals.row(q).transpose();
  }
  return Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
}

Eigen::VectorXd project_onto_edge(const std::function<double(Vec2)>& f,
                                  const EdgeBasis& basis, Vec2 a, Vec2 b,
                                  int quad_degree) {
  const int deg = std::max(quad_degree, 2 * basis.degree());
  const EdgeQuadrature rule = edge_quadrature(deg);
  const Eigen::MatrixXd vals = basis.values(rule.pts);
  const int n = basis.dim();
  // The arclength Jacobian cancels between the Gram and the moments, so both
  // sides are computed in the unit parameterization.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 p = a + rule.pts[q] * (b - a);
    gram.noalias() += rule.wts[q] * vals.row(q).transpose() * vals.row(q);
    rhs.noalias() += rule.wts[q] * f(p) * vals.row(q).transpose();
  }
  return Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);
}

}  // namespace wg
