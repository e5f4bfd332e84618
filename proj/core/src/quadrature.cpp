#include "wg/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "wg/errors.hpp"

namespace wg {

namespace {

constexpr int kMaxDegree = 64;

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxDegree) {
    throw ConfigError("quadrature degree must be in [0, " +
                      std::to_string(kMaxDegree) + "], got " +
                      std::to_string(degree));
  }
}

// Gauss nodes/weights on [-1,1] from the symmetric tridiagonal Jacobi matrix
// of the weight's orthogonal polynomial recurrence (Golub-Welsch). mu0 is the
// weight's total mass; weights are mu0 times the squared first eigenvector
// components.
void golub_welsch(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                  double mu0, std::vector<double>& pts,
                  std::vector<double>& wts) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = alpha(i);
    if (i + 1 < n) {
      const double b = std::sqrt(beta(i + 1));
      J(i, i + 1) = b;
      J(i + 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw SolverError("Jacobi matrix eigensolve failed");
  pts.resize(n);
  wts.resize(n);
  for (int i = 0; i < n; ++i) {
    pts[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    wts[i] = mu0 * v0 * v0;
  }
}

// Legendre weight 1 on [-1,1]: alpha_k = 0, beta_k = k^2 / (4k^2 - 1).
void gauss_legendre(int n, std::vector<double>& pts, std::vector<double>& wts) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd beta(n);
  beta(0) = 2.0;
  for (int k = 1; k < n; ++k)
    beta(k) = static_cast<double>(k) * k / (4.0 * k * k - 1.0);
  golub_welsch(alpha, beta, 2.0, pts, wts);
}

// Jacobi weight (1-x) on [-1,1]:
// alpha_k = -1 / ((2k+1)(2k+3)), beta_k = k(k+1) / (2k+1)^2.
void gauss_jacobi_10(int n, std::vector<double>& pts,
                     std::vector<double>& wts) {
  Eigen::VectorXd alpha(n), beta(n);
  for (int k = 0; k < n; ++k)
    alpha(k) = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  beta(0) = 2.0;
  for (int k = 1; k < n; ++k) {
    const double d = 2.0 * k + 1.0;
    beta(k) = static_cast<double>(k) * (k + 1.0) / (d * d);
  }
  golub_welsch(alpha, beta, 2.0, pts, wts);
}

// Collapsed-square product rule: x = xi (1 - eta), y = eta turns the integral
// over the reference triangle into
//   int_0^1 int_0^1 f(xi (1 - eta), eta) (1 - eta) dxi deta,
// handled by Gauss-Legendre in xi and Gauss-Jacobi (weight 1-eta) in eta.
TriQuadrature conical_product(int degree) {
  const int n = degree / 2 + 1;
  std::vector<double> xi, wxi, eta, weta;
  gauss_legendre_01(n, xi, wxi);
  gauss_jacobi_10(n, eta, weta);
  for (int j = 0; j < n; ++j) {
    eta[j] = 0.5 * (eta[j] + 1.0);
    weta[j] *= 0.25;  // dx/2 and one (1-x)/2 from the variable change
  }
  TriQuadrature rule;
  rule.degree = degree;
  rule.pts.reserve(n * n);
  rule.wts.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      rule.pts.push_back({xi[i] * (1.0 - eta[j]), eta[j]});
      rule.wts.push_back(wxi[i] * weta[j]);
    }
  }
  return rule;
}

void push_symmetric(TriQuadrature& rule, double a, double w) {
  // Orbit of barycentric (1-2a, a, a); w is the weight on the unit triangle.
  rule.pts.push_back({a, a});
  rule.pts.push_back({1.0 - 2.0 * a, a});
  rule.pts.push_back({a, 1.0 - 2.0 * a});
  for (int i = 0; i < 3; ++i) rule.wts.push_back(w);
}

TriQuadrature tabulated(int degree) {
  TriQuadrature rule;
  rule.degree = degree;
  if (degree <= 1) {
    rule.pts = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.wts = {0.5};
  } else if (degree == 2) {
    push_symmetric(rule, 1.0 / 6.0, 1.0 / 6.0);
  } else if (degree <= 4) {
    push_symmetric(rule, 0.445948490915965, 0.5 * 0.223381589678011);
    push_symmetric(rule, 0.091576213509771, 0.5 * 0.109951743655322);
  } else {  // degree 5
    rule.pts = {{1.0 / 3.0, 1.0 / 3.0}};
    rule.wts = {0.5 * 0.225};
    push_symmetric(rule, 0.470142064105115, 0.5 * 0.132394152788506);
    push_symmetric(rule, 0.101286507323456, 0.5 * 0.125939180544827);
  }
  return rule;
}

}  // namespace

void gauss_legendre_01(int n, std::vector<double>& pts,
                       std::vector<double>& wts) {
  if (n < 1) throw ConfigError("gauss_legendre_01 needs n >= 1");
  gauss_legendre(n, pts, wts);
  for (int i = 0; i < n; ++i) {
    pts[i] = 0.5 * (pts[i] + 1.0);
    wts[i] *= 0.5;
  }
}

TriQuadrature triangle_quadrature(int degree) {
  check_degree(degree);
  if (degree <= 5) return tabulated(degree);
  return conical_product(degree);
}

EdgeQuadrature edge_quadrature(int degree) {
  check_degree(degree);
  EdgeQuadrature rule;
  rule.degree = degree;
  gauss_legendre_01((degree + 2) / 2, rule.pts, rule.wts);
  return rule;
}

MappedQuadrature map_to_triangle(const TriQuadrature& rule, Vec2 v0, Vec2 v1,
                                 Vec2 v2) {
  const double jac = cross(v1 - v0, v2 - v0);  // 2 * signed area
  MappedQuadrature out;
  out.pts.reserve(rule.size());
  out.wts.reserve(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    const Vec2 r = rule.pts[q];
    out.pts.push_back(v0 + r.x * (v1 - v0) + r.y * (v2 - v0));
    out.wts.push_back(rule.wts[q] * jac);
  }
  return out;
}

MappedQuadrature map_to_edge(const EdgeQuadrature& rule, Vec2 a, Vec2 b) {
  const double len = norm(b - a);
  MappedQuadrature out;
  out.pts.reserve(rule.size());
  out.wts.reserve(rule.size());
  for (int q = 0; q < rule.size(); ++q) {
    out.pts.push_back(a + rule.pts[q] * (b - a));
    out.wts.push_back(rule.wts[q] * len);
  }
  return out;
}

}  // namespace wg
