#include "wg/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

#include "wg/errors.hpp"

namespace wg {

int Mesh::num_boundary_edges() const {
  int n = 0;
  for (const Edge& e : edges) n += e.boundary ? 1 : 0;
  return n;
}

std::array<Vec2, 3> Mesh::tri_vertices(int t) const {
  return {nodes[tris[t][0]], nodes[tris[t][1]], nodes[tris[t][2]]};
}

Vec2 Mesh::edge_point(int e, double s) const {
  const Vec2 a = nodes[edges[e].nodes[0]];
  const Vec2 b = nodes[edges[e].nodes[1]];
  return a + s * (b - a);
}

Mesh make_mesh_unchecked(std::vector<Vec2> nodes,
                         std::vector<std::array<int, 3>> tris) {
  Mesh m;
  m.nodes = std::move(nodes);
  m.tris = std::move(tris);
  const int nt = m.num_tris();
  m.tri_edges.assign(nt, {-1, -1, -1});
  m.tri_normals.assign(nt, {});
  m.tri_area.assign(nt, 0.0);
  m.tri_diameter.assign(nt, 0.0);
  m.tri_centroid.assign(nt, {});

  std::map<std::pair<int, int>, int> edge_of;
  for (int t = 0; t < nt; ++t) {
    for (int j = 0; j < 3; ++j) {
      const int u = m.tris[t][j];
      const int v = m.tris[t][(j + 1) % 3];
      const auto key = std::minmax(u, v);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.nodes = {key.first, key.second};
        it = edge_of.emplace(key, m.num_edges()).first;
        m.edges.push_back(e);
      }
      Edge& e = m.edges[it->second];
      if (e.adj_count < 2) e.tris[e.adj_count] = t;
      ++e.adj_count;
      m.tri_edges[t][j] = it->second;
    }
  }
  for (Edge& e : m.edges) {
    e.length = norm(m.nodes[e.nodes[1]] - m.nodes[e.nodes[0]]);
    e.boundary = (e.adj_count == 1);
  }

  for (int t = 0; t < nt; ++t) {
    const auto v = m.tri_vertices(t);
    m.tri_area[t] = 0.5 * cross(v[1] - v[0], v[2] - v[0]);
    m.tri_centroid[t] = (1.0 / 3.0) * (v[0] + v[1] + v[2]);
    double d = 0.0;
    for (int j = 0; j < 3; ++j) {
      const Vec2 tang = v[(j + 1) % 3] - v[j];
      const double len = norm(tang);
      d = std::max(d, len);
      // For a counterclockwise element the right-hand rotation of the edge
      // tangent points outward.
      m.tri_normals[t][j] =
          len > 0.0 ? (1.0 / len) * Vec2{tang.y, -tang.x} : Vec2{0.0, 0.0};
    }
    m.tri_diameter[t] = d;
    m.h = std::max(m.h, d);
  }
  return m;
}

MeshDiagnostics validate(const Mesh& m, double regularity_bound) {
  MeshDiagnostics diag;
  auto report = [&diag](const std::string& s) { diag.violations.push_back(s); };
  char buf[160];

  const int nn = m.num_nodes();
  for (int t = 0; t < m.num_tris(); ++t) {
    for (int j = 0; j < 3; ++j) {
      const int v = m.tris[t][j];
      if (v < 0 || v >= nn) {
        std::snprintf(buf, sizeof buf, "triangle %d: node index %d out of range",
                      t, v);
        report(buf);
      }
    }
    if (m.tris[t][0] == m.tris[t][1] || m.tris[t][1] == m.tris[t][2] ||
        m.tris[t][0] == m.tris[t][2]) {
      std::snprintf(buf, sizeof buf, "triangle %d: repeated node index", t);
      report(buf);
    }
  }
  if (!diag.violations.empty()) return diag;  // geometry below needs valid ids

  for (int t = 0; t < m.num_tris(); ++t) {
    if (!(m.tri_area[t] > 0.0)) {
      std::snprintf(buf, sizeof buf,
                    "triangle %d: not counterclockwise (signed area %.3e)", t,
                    m.tri_area[t]);
      report(buf);
      continue;
    }
    double perimeter = 0.0;
    for (int j = 0; j < 3; ++j) perimeter += m.edges[m.tri_edges[t][j]].length;
    const double inradius = 2.0 * m.tri_area[t] / perimeter;
    const double ratio = m.tri_diameter[t] / inradius;
    diag.max_regularity_ratio = std::max(diag.max_regularity_ratio, ratio);
    if (ratio > regularity_bound) {
      std::snprintf(buf, sizeof buf,
                    "triangle %d: shape ratio %.3f exceeds bound %.3f", t,
                    ratio, regularity_bound);
      report(buf);
    }
  }

  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.edges[e].adj_count > 2) {
      std::snprintf(buf, sizeof buf, "edge %d: shared by %d triangles", e,
                    m.edges[e].adj_count);
      report(buf);
    }
  }

  // Each node on the boundary must touch exactly two boundary edges, so the
  // boundary decomposes into closed loops.
  std::vector<int> bcount(nn, 0);
  for (const Edge& e : m.edges) {
    if (e.boundary) {
      ++bcount[e.nodes[0]];
      ++bcount[e.nodes[1]];
    }
  }
  for (int v = 0; v < nn; ++v) {
    if (bcount[v] != 0 && bcount[v] != 2) {
      std::snprintf(buf, sizeof buf,
                    "node %d: touches %d boundary edges (expected 0 or 2)", v,
                    bcount[v]);
      report(buf);
    }
  }

  // Euler characteristic of a triangulated disk: V - E + T = 1.
  const long long euler = static_cast<long long>(nn) - m.num_edges() +
                          static_cast<long long>(m.num_tris());
  if (euler != 1) {
    std::snprintf(buf, sizeof buf,
                  "Euler characteristic V-E+T = %lld (expected 1)", euler);
    report(buf);
  }
  return diag;
}

Mesh make_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> tris) {
  Mesh m = make_mesh_unchecked(std::move(nodes), std::move(tris));
  const MeshDiagnostics diag = validate(m);
  if (!diag.ok()) {
    std::string msg = "invalid mesh:";
    for (const std::string& v : diag.violations) msg += "\n  " + v;
    throw ConfigError(msg);
  }
  return m;
}

namespace {

long long cells_per_side(int level) {
  if (level < 1 || level > 14) {
    throw ConfigError("grid level must be in [1, 14], got " +
                      std::to_string(level));
  }
  return 1LL << (level - 1);
}

// Uniform grid topology; nodes may be displaced afterwards.
void unit_square_grid(int level, std::vector<Vec2>& nodes,
                      std::vector<std::array<int, 3>>& tris) {
  const long long m = cells_per_side(level);
  if ((m + 1) * (m + 1) > std::numeric_limits<int>::max()) {
    throw ConfigError("grid level " + std::to_string(level) + " too large");
  }
  const int n = static_cast<int>(m);
  const double s = 1.0 / static_cast<double>(n);
  nodes.clear();
  tris.clear();
  nodes.reserve((n + 1) * (n + 1));
  tris.reserve(2 * n * n);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      nodes.push_back({i * s, j * s});
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  // Split each square with the diagonal from its top-left corner to its
  // bottom-right corner; both children are counterclockwise.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      tris.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
}

// 64-bit linear congruential generator (Knuth's MMIX multiplier). The
// sequence, and therefore every perturbed mesh, is reproducible from the
// seed alone on any platform.
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed) {}
  double uniform01() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  double symmetric() { return 2.0 * uniform01() - 1.0; }
};

}  // namespace

Mesh build_uniform_grid(int level) {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;
  unit_square_grid(level, nodes, tris);
  return make_mesh(std::move(nodes), std::move(tris));
}

Mesh build_perturbed_grid(int level, std::uint64_t seed, double magnitude) {
  if (!(magnitude >= 0.0 && magnitude <= 0.3)) {
    throw ConfigError("perturbation magnitude must be in [0, 0.3]");
  }
  const long long m = cells_per_side(level);
  const int n = static_cast<int>(m);
  const double s = 1.0 / static_cast<double>(n);

  double mag = magnitude;
  for (int attempt = 0; attempt < 3; ++attempt, mag *= 0.5) {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> tris;
    unit_square_grid(level, nodes, tris);
    // Interior nodes only, visited in node order; two draws per node. The
    // 1/sqrt(2) factor keeps the offset norm below mag * spacing.
    Lcg rng(seed);
    const double scale = mag * s / std::sqrt(2.0);
    for (int j = 1; j < n; ++j) {
      for (int i = 1; i < n; ++i) {
        Vec2& p = nodes[j * (n + 1) + i];
        const double dx = rng.symmetric();
        const double dy = rng.symmetric();
        p.x += scale * dx;
        p.y += scale * dy;
      }
    }
    Mesh mesh = make_mesh_unchecked(std::move(nodes), std::move(tris));
    if (validate(mesh).ok()) return mesh;
  }
  throw ConfigError("perturbed grid failed validation after 3 attempts");
}

}  // namespace wg
