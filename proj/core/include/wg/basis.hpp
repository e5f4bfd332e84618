#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

// Polynomial basis of P_degree on one triangle. Starts from monomials in the
// centered, diameter-scaled coordinates ((x-xc)/h, (y-yc)/h) in graded
// lexicographic order (1, X, Y, X^2, XY, Y^2, ...) and, by default, applies a
// Cholesky orthonormalization of the L2 Gram so that (psi_i, psi_j)_T =
// delta_ij. Well conditioned through degree 5.
class ElementBasis {
 public:
  ElementBasis(int degree, Vec2 v0, Vec2 v1, Vec2 v2,
               bool orthonormalize = true);

  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(exponents_.size()); }
  Vec2 centroid() const { return centroid_; }
  double scale() const { return scale_; }

  // Exponent pair (a, b) of monomial i in the scaled coordinates.
  std::pair<int, int> exponent(int i) const { return exponents_[i]; }

  // rows = points, cols = basis functions
  Eigen::MatrixXd values(std::span<const Vec2> pts) const;
  void gradients(std::span<const Vec2> pts, Eigen::MatrixXd& ddx,
                 Eigen::MatrixXd& ddy) const;
  double eval(int i, Vec2 p) const;

  // Lower-triangular change of basis: psi = transform * monomials.
  const Eigen::MatrixXd& transform() const { return transform_; }

 private:
  Eigen::MatrixXd monomial_values(std::span<const Vec2> pts) const;

  int degree_;
  Vec2 centroid_;
  double scale_;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd transform_;
};

// Orthonormal polynomial basis on an edge in its canonical arclength
// parameterization s in [0,1]: chi_j(s) = sqrt(2j+1) * P_j(2s-1), so the
// edge Gram <chi_i, chi_j>_e equals |e| * delta_ij.
class EdgeBasis {
 public:
  EdgeBasis(int degree, double length);

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  double length() const { return length_; }

  // rows = parameters, cols = basis functions
  Eigen::MatrixXd values(std::span<const double> s) const;
  double eval(int j, double s) const;

 private:
  int degree_;
  double length_;
};

inline constexpr int kMaxElementDegree = 5;

// L2 projection coefficients onto an element basis: solves the Gram system
// G c = (f, psi_i)_T with the given quadrature degree for the moments.
Eigen::VectorXd project_onto_element(const std::function<double(Vec2)>& f,
                                     const ElementBasis& basis, Vec2 v0,
                                     Vec2 v1, Vec2 v2, int quad_degree);

// L2 projection onto an edge basis along the segment a -> b.
Eigen::VectorXd project_onto_edge(const std::function<double(Vec2)>& f,
                                  const EdgeBasis& basis, Vec2 a, Vec2 b,
                                  int quad_degree);

}  // namespace wg
