#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kacfem/geometry.hpp"

namespace kacfem {

inline constexpr int kNoNeighbor = -1;

struct Vertex {
  double x = 0.0;
  double y = 0.0;
  bool on_boundary = false;

  Vec2 pos() const { return {x, y}; }
};

/// Triangle of a conforming mesh. Vertex indices are ordered counterclockwise
/// with the refinement edge opposite the local vertex 0 (newest-vertex
/// convention): bisection inserts the midpoint of edge (v[1], v[2]).
/// neighbor[i] is the element across the edge opposite v[i], or kNoNeighbor
/// when that edge lies on the boundary.
struct Element {
  std::array<int, 3> v{};
  std::array<int, 3> neighbor{kNoNeighbor, kNoNeighbor, kNoNeighbor};
  int generation = 0;
};

/// Immutable conforming triangulation. Refinement returns a new mesh, so
/// meshes can be shared read-only across threads.
class Mesh {
 public:
  Mesh(std::vector<Vertex> vertices, std::vector<Element> elements,
       std::set<std::pair<int, int>> boundary_edges);

  /// Build a mesh from raw coordinates and vertex triples. Computes adjacency
  /// and boundary information, orients every triangle counterclockwise,
  /// labels the longest edge of each element as its refinement edge, and
  /// verifies that the resulting labeling admits a terminating conformity
  /// closure. Throws std::invalid_argument for degenerate or nonconforming
  /// input.
  static Mesh from_raw(const std::vector<std::pair<double, double>>& coords,
                       const std::vector<std::array<int, 3>>& triangles);

  std::uint64_t id() const { return id_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int element_count() const { return static_cast<int>(elements_.size()); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::set<std::pair<int, int>>& boundary_edges() const { return boundary_edges_; }

  Vec2 point(int v) const { return vertices_[v].pos(); }
  std::array<Vec2, 3> triangle(int t) const;
  double area(int t) const;
  double total_area() const;

 private:
  std::uint64_t id_;
  std::vector<Vertex> vertices_;
  std::vector<Element> elements_;
  std::set<std::pair<int, int>> boundary_edges_;
};

/// Record of one refinement step, enough to transfer nodal data exactly and
/// to map elements to their descendants.
struct RefinementMap {
  std::uint64_t source_mesh_id = 0;
  std::uint64_t result_mesh_id = 0;
  int source_vertex_count = 0;
  /// For each vertex created by the refinement (index source_vertex_count + i
  /// in the result mesh), the two endpoints of the edge it bisected.
  std::vector<std::array<int, 2>> midpoint_edge;
  /// children[t] lists the elements of the result mesh that tile source
  /// element t (just {t'} when t survived unrefined).
  std::vector<std::vector<int>> children;
};

struct BisectResult {
  Mesh mesh;
  RefinementMap map;
};

/// Minimal conforming triangulation of the L-shaped domain
/// (-1,1)^2 \ [0,1]x[-1,0]: 8 boundary vertices, 6 right isoceles triangles,
/// refinement edges on the square diagonals (a compatible labeling).
Mesh make_lshape_mesh();

/// Square (-1,1)^2 as 4 triangles joined at the center vertex, refinement
/// edges on the outer sides (a compatible labeling).
Mesh make_square_mesh();

/// Bisect every marked element at least n times, restoring conformity by
/// recursive closure. Rejects n < 1 and out-of-range indices.
BisectResult bisect(const Mesh& mesh, const std::vector<int>& marked, int n);

/// bisect() with every element marked.
BisectResult uniform_refine(const Mesh& mesh, int n);

/// Local mesh size H_T = |T|^{1/2}.
double mesh_size(const Mesh& mesh, int t);

/// T together with its edge-neighbors (up to 4 elements), sorted ascending.
std::vector<int> patch(const Mesh& mesh, int t);

/// max over elements of diam(T) / rho_T with rho_T = 2|T|/perimeter(T).
double audit_shape_regularity(const Mesh& mesh);

struct ConformityReport {
  bool ok = true;
  std::string detail;
};

/// Brute-force pairwise geometric conformity test: any two distinct closed
/// elements may intersect only in a full shared edge, a single shared vertex,
/// or not at all. Also validates neighbor symmetry and positive areas.
/// Quadratic in the element count; intended for meshes up to a few thousand
/// elements.
ConformityReport check_conformity(const Mesh& mesh);

}  // namespace kacfem
