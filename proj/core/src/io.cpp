#include "kacfem/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kacfem {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "vertices " << mesh.vertex_count() << '\n';
  out << "elements " << mesh.element_count() << '\n';
  for (const Vertex& v : mesh.vertices())
    out << fmt17(v.x) << ' ' << fmt17(v.y) << ' ' << (v.on_boundary ? 1 : 0) << '\n';
  for (const Element& e : mesh.elements())
    out << e.v[0] << ' ' << e.v[1] << ' ' << e.v[2] << ' ' << e.generation << '\n';
}

void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(out, mesh);
}

Mesh read_mesh(std::istream& in) {
  std::string word;
  int nv = 0, ne = 0;
  if (!(in >> word >> nv) || word != "vertices")
    throw std::runtime_error("mesh dump: expected 'vertices N'");
  if (!(in >> word >> ne) || word != "elements")
    throw std::runtime_error("mesh dump: expected 'elements M'");
  std::vector<std::pair<double, double>> coords(nv);
  std::vector<int> boundary_flags(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> coords[i].first >> coords[i].second >> boundary_flags[i]))
      throw std::runtime_error("mesh dump: truncated vertex list");
  std::vector<std::array<int, 3>> triangles(ne);
  for (int t = 0; t < ne; ++t) {
    int gen = 0;
    if (!(in >> triangles[t][0] >> triangles[t][1] >> triangles[t][2] >> gen))
      throw std::runtime_error("mesh dump: truncated element list");
  }
  // from_raw recomputes adjacency, boundary flags and refinement-edge labels;
  // generations are not round-tripped.
  return Mesh::from_raw(coords, triangles);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_mesh(in);
}

void write_p1(std::ostream& out, const P1Function& fn) {
  out << "p1 " << fn.coeffs.size() << '\n';
  for (double c : fn.coeffs) out << fmt17(c) << '\n';
}

void write_estimates(std::ostream& out, const LocalEstimates& est) {
  for (std::size_t t = 0; t < est.eta.size(); ++t) out << t << ' ' << fmt17(est.eta[t]) << '\n';
}

}  // namespace kacfem
