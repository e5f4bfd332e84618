#pragma once

#include <vector>

#include "wg/mesh.hpp"

namespace wg {

// Rule on the reference triangle {(0,0), (1,0), (0,1)}; weights sum to 1/2.
struct TriQuadrature {
  std::vector<Vec2> pts;
  std::vector<double> wts;
  int degree = 0;
  int size() const { return static_cast<int>(wts.size()); }
};

// Rule on [0,1]; weights sum to 1.
struct EdgeQuadrature {
  std::vector<double> pts;
  std::vector<double> wts;
  int degree = 0;
  int size() const { return static_cast<int>(wts.size()); }
};

// Exact for polynomials of total degree <= degree. Compact symmetric rules
// up to degree 5, a Gauss conical product rule beyond. All weights positive.
TriQuadrature triangle_quadrature(int degree);

// Gauss-Legendre with ceil((degree+1)/2) points.
EdgeQuadrature edge_quadrature(int degree);

// Gauss-Legendre nodes/weights on [0,1] (weights sum to 1).
void gauss_legendre_01(int n, std::vector<double>& pts,
                       std::vector<double>& wts);

// Rule mapped to a physical element or edge.
struct MappedQuadrature {
  std::vector<Vec2> pts;
  std::vector<double> wts;  // include the Jacobian; sum to area or length
  int size() const { return static_cast<int>(wts.size()); }
};

MappedQuadrature map_to_triangle(const TriQuadrature& rule, Vec2 v0, Vec2 v1,
                                 Vec2 v2);
// Points along the segment a -> b at the rule's parameters.
MappedQuadrature map_to_edge(const EdgeQuadrature& rule, Vec2 a, Vec2 b);

}  // namespace wg
