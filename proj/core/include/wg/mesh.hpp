#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace wg {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Edge endpoints are stored with the lower node index first; that order is
// the canonical parameterization shared by the two adjacent triangles.
struct Edge {
  std::array<int, 2> nodes{-1, -1};
  std::array<int, 2> tris{-1, -1};  // tris[1] == -1 on the boundary
  int adj_count = 0;
  double length = 0.0;
  bool boundary = false;
};

// Conforming triangulation with full edge connectivity and per-element
// geometry. Local edge j of a triangle joins local vertices j and (j+1)%3;
// normals point out of the element.
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // counterclockwise node indices
  std::vector<Edge> edges;               // first-encounter order over tris
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<Vec2, 3>> tri_normals;
  std::vector<double> tri_area;
  std::vector<double> tri_diameter;
  std::vector<Vec2> tri_centroid;
  double h = 0.0;  // max element diameter

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_boundary_edges() const;
  std::array<Vec2, 3> tri_vertices(int t) const;
  // Physical point at parameter s in [0,1] along the canonical edge direction.
  Vec2 edge_point(int e, double s) const;
};

inline constexpr double kShapeRegularityBound = 10.0;

struct MeshDiagnostics {
  std::vector<std::string> violations;
  double max_regularity_ratio = 0.0;  // diameter / inradius over all elements
  bool ok() const { return violations.empty(); }
};

// Checks orientation, edge conformity (every edge in one or two triangles,
// boundary forming closed loops), the Euler characteristic of a simply
// connected domain, and shape regularity.
MeshDiagnostics validate(const Mesh& m,
                         double regularity_bound = kShapeRegularityBound);

// Builds connectivity and geometry caches without validating; use for
// inspecting intentionally broken input.
Mesh make_mesh_unchecked(std::vector<Vec2> nodes,
                         std::vector<std::array<int, 3>> tris);

// make_mesh_unchecked + validate; throws ConfigError listing all violations.
Mesh make_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> tris);

// Uniform triangulation of the unit square at refinement level >= 1:
// 2^(level-1) squares per side, each split by its top-left to bottom-right
// diagonal. Element diameter is sqrt(2) * 2^(1-level).
Mesh build_uniform_grid(int level);

// Uniform grid with interior nodes displaced by a deterministic pseudo-random
// offset of at most magnitude * spacing (magnitude in [0, 0.3]). If the
// perturbed mesh fails validation the magnitude is halved, up to three tries.
Mesh build_perturbed_grid(int level, std::uint64_t seed, double magnitude);

}  // namespace wg
