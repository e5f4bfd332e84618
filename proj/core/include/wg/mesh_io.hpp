#pragma once

#include <iosfwd>
#include <string>

#include "wg/mesh.hpp"

namespace wg {

// Plain-text mesh format:
//
//   wgmesh 2d v1
//   nodes <N>
//   <x> <y>          (N lines)
//   triangles <M>
//   <a> <b> <c>      (M lines, 0-based counterclockwise node indices)
//
// '#' starts a comment; blank lines are ignored. Coordinates are written
// with 17 significant digits so a write/read cycle is bit-exact.

void write_mesh(std::ostream& out, const Mesh& m);
void write_mesh_file(const std::string& path, const Mesh& m);

// Throws IoError with a line number on malformed input and ConfigError if
// the parsed mesh fails validation.
Mesh read_mesh(std::istream& in, const std::string& origin = "<stream>");
Mesh read_mesh_file(const std::string& path);

}  // namespace wg
