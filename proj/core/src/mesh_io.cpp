#include "wg/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "wg/errors.hpp"

namespace wg {

void write_mesh(std::ostream& out, const Mesh& m) {
  char buf[80];
  out << "wgmesh 2d v1\n";
  out << "nodes " << m.num_nodes() << "\n";
  for (const Vec2& p : m.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out << buf;
  }
  out << "triangles " << m.num_tris() << "\n";
  for (const auto& t : m.tris)
    out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

void write_mesh_file(const std::string& path, const Mesh& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_mesh(out, m);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& origin)
      : in_(in), origin_(origin) {}

  // Next non-blank line with comments stripped; false at end of input.
  bool next(std::string& line) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++lineno_;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      const auto end = raw.find_last_not_of(" \t\r");
      if (end == std::string::npos) continue;
      line = raw.substr(0, end + 1);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(origin_ + ":" + std::to_string(lineno_) + ": " + what);
  }

  std::string require(const std::string& what) {
    std::string line;
    if (!next(line)) fail("unexpected end of input, expected " + what);
    return line;
  }

 private:
  std::istream& in_;
  std::string origin_;
  int lineno_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& origin) {
  LineReader reader(in, origin);

  {
    std::istringstream ss(reader.require("header 'wgmesh 2d v1'"));
    std::string magic, dim, ver;
    ss >> magic >> dim >> ver;
    if (magic != "wgmesh" || dim != "2d" || ver != "v1")
      reader.fail("bad header, expected 'wgmesh 2d v1'");
  }

  long long nn = -1;
  {
    std::istringstream ss(reader.require("'nodes <count>'"));
    std::string kw;
    ss >> kw >> nn;
    if (ss.fail() || kw != "nodes" || nn < 0)
      reader.fail("expected 'nodes <count>'");
  }
  std::vector<Vec2> nodes(static_cast<size_t>(nn));
  for (long long i = 0; i < nn; ++i) {
    std::istringstream ss(reader.require("node coordinates"));
    std::string extra;
    ss >> nodes[i].x >> nodes[i].y;
    if (ss.fail()) reader.fail("expected two coordinates");
    if (ss >> extra) reader.fail("trailing text after coordinates");
  }

  long long nt = -1;
  {
    std::istringstream ss(reader.require("'triangles <count>'"));
    std::string kw;
    ss >> kw >> nt;
    if (ss.fail() || kw != "triangles" || nt < 0)
      reader.fail("expected 'triangles <count>'");
  }
  std::vector<std::array<int, 3>> tris(static_cast<size_t>(nt));
  for (long long i = 0; i < nt; ++i) {
    std::istringstream ss(reader.require("triangle node indices"));
    std::string extra;
    ss >> tris[i][0] >> tris[i][1] >> tris[i][2];
    if (ss.fail()) reader.fail("expected three node indices");
    if (ss >> extra) reader.fail("trailing text after node indices");
  }

  std::string stray;
  if (reader.next(stray)) reader.fail("unexpected content after triangles");

  return make_mesh(std::move(nodes), std::move(tris));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_mesh(in, path);
}

}  // namespace wg
