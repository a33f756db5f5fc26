#include "kacfem/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "kacfem/sums.hpp"

namespace kacfem {

namespace {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

std::pair<int, int> sorted_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Element> elements,
           std::set<std::pair<int, int>> boundary_edges)
    : id_(next_mesh_id()),
      vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      boundary_edges_(std::move(boundary_edges)) {}

std::array<Vec2, 3> Mesh::triangle(int t) const {
  const Element& e = elements_[t];
  return {point(e.v[0]), point(e.v[1]), point(e.v[2])};
}

double Mesh::area(int t) const {
  const auto tr = triangle(t);
  return signed_area(tr[0], tr[1], tr[2]);
}

double Mesh::total_area() const {
  std::vector<double> areas(elements_.size());
  for (int t = 0; t < element_count(); ++t) areas[t] = area(t);
  return pairwise_sum(areas);
}

// ---------------------------------------------------------------------------
// Construction from raw input
// ---------------------------------------------------------------------------

Mesh Mesh::from_raw(const std::vector<std::pair<double, double>>& coords,
                    const std::vector<std::array<int, 3>>& triangles) {
  std::vector<Vertex> vertices(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i].first) || !std::isfinite(coords[i].second))
      throw std::invalid_argument("from_raw: non-finite vertex coordinate");
    vertices[i] = {coords[i].first, coords[i].second, false};
  }

  std::vector<Element> elements(triangles.size());
  const int nv = static_cast<int>(vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    std::array<int, 3> v = triangles[t];
    for (int i : v)
      if (i < 0 || i >= nv) throw std::invalid_argument("from_raw: vertex index out of range");
    Vec2 p0 = vertices[v[0]].pos(), p1 = vertices[v[1]].pos(), p2 = vertices[v[2]].pos();
    double a = signed_area(p0, p1, p2);
    if (a < 0) {
      std::swap(v[1], v[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw std::invalid_argument("from_raw: degenerate (collinear) element");
    // Rotate so the longest edge sits opposite local vertex 0.
    const auto len2 = [&](int i, int j) {
      const Vec2 d = vertices[v[j]].pos() - vertices[v[i]].pos();
      return dot(d, d);
    };
    const double opp0 = len2(1, 2), opp1 = len2(2, 0), opp2 = len2(0, 1);
    int shift = 0;
    if (opp1 > opp0 && opp1 >= opp2)
      shift = 1;
    else if (opp2 > opp0 && opp2 > opp1)
      shift = 2;
    elements[t].v = {v[shift], v[(shift + 1) % 3], v[(shift + 2) % 3]};
    elements[t].generation = 0;
  }

  // Adjacency from an edge table; more than two elements per edge means the
  // input is not a valid triangulation.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_table;
  for (std::size_t t = 0; t < elements.size(); ++t) {
    const auto& v = elements[t].v;
    for (int i = 0; i < 3; ++i)
      edge_table[sorted_edge(v[(i + 1) % 3], v[(i + 2) % 3])].emplace_back(static_cast<int>(t), i);
  }
  std::set<std::pair<int, int>> boundary_edges;
  for (const auto& [edge, incident] : edge_table) {
    if (incident.size() > 2) throw std::invalid_argument("from_raw: edge shared by >2 elements");
    if (incident.size() == 1) {
      boundary_edges.insert(edge);
      vertices[edge.first].on_boundary = true;
      vertices[edge.second].on_boundary = true;
    } else {
      const auto [ta, ia] = incident[0];
      const auto [tb, ib] = incident[1];
      elements[ta].neighbor[ia] = tb;
      elements[tb].neighbor[ib] = ta;
    }
  }

  Mesh mesh(std::move(vertices), std::move(elements), std::move(boundary_edges));

  // The longest-edge labeling is not guaranteed to admit a terminating
  // closure for arbitrary input; run a fully marked refinement once to
  // verify (bisect throws when the recursion guard trips).
  std::vector<int> all(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) all[t] = t;
  try {
    (void)bisect(mesh, all, 1);
  } catch (const std::runtime_error& err) {
    throw std::invalid_argument(std::string("from_raw: incompatible refinement-edge labeling: ") +
                                err.what());
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Domain factories
// ---------------------------------------------------------------------------

Mesh make_lshape_mesh() {
  // (-1,1)^2 minus the closed fourth-quadrant square [0,1]x[-1,0]; re-entrant
  // corner at the origin. Three unit squares, each split along the diagonal
  // through the origin-side corner, refinement edges on the diagonals.
  std::vector<Vertex> vertices = {
      {-1.0, -1.0, true}, {0.0, -1.0, true}, {-1.0, 0.0, true}, {0.0, 0.0, true},
      {1.0, 0.0, true},   {-1.0, 1.0, true}, {0.0, 1.0, true},  {1.0, 1.0, true},
  };
  std::vector<Element> elements(6);
  elements[0] = {{1, 3, 0}, {1, kNoNeighbor, kNoNeighbor}, 0};
  elements[1] = {{2, 0, 3}, {0, 2, kNoNeighbor}, 0};
  elements[2] = {{2, 3, 5}, {3, kNoNeighbor, 1}, 0};
  elements[3] = {{6, 5, 3}, {2, 5, kNoNeighbor}, 0};
  elements[4] = {{4, 7, 3}, {5, kNoNeighbor, kNoNeighbor}, 0};
  elements[5] = {{6, 3, 7}, {4, kNoNeighbor, 3}, 0};
  std::set<std::pair<int, int>> boundary = {
      {0, 1}, {1, 3}, {3, 4}, {4, 7}, {6, 7}, {5, 6}, {2, 5}, {0, 2},
  };
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary));
}

Mesh make_square_mesh() {
  std::vector<Vertex> vertices = {
      {-1.0, -1.0, true}, {1.0, -1.0, true}, {1.0, 1.0, true}, {-1.0, 1.0, true},
      {0.0, 0.0, false},
  };
  std::vector<Element> elements(4);
  elements[0] = {{4, 0, 1}, {kNoNeighbor, 1, 3}, 0};
  elements[1] = {{4, 1, 2}, {kNoNeighbor, 2, 0}, 0};
  elements[2] = {{4, 2, 3}, {kNoNeighbor, 3, 1}, 0};
  elements[3] = {{4, 3, 0}, {kNoNeighbor, 0, 2}, 0};
  std::set<std::pair<int, int>> boundary = {{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary));
}

// ---------------------------------------------------------------------------
// Newest-vertex bisection with recursive conformity closure
// ---------------------------------------------------------------------------

namespace {

// Mutable refinement forest. Input elements are the roots; leaves form the
// output mesh. Neighbor triples are maintained on leaves only.
struct Forest {
  struct Node {
    std::array<int, 3> v;
    std::array<int, 3> nbr;
    int generation;
    int ancestor;
    int child0 = -1;
    int child1 = -1;

    bool is_leaf() const { return child0 < 0; }
  };

  std::vector<Vertex> verts;
  std::vector<Node> nodes;
  std::set<std::pair<int, int>> boundary_edges;
  std::vector<std::array<int, 2>> midpoint_edge;
  int max_generation = 0;
  int depth_slack = 0;  // extra closure depth allowed on top of max_generation

  explicit Forest(const Mesh& mesh)
      : verts(mesh.vertices()), boundary_edges(mesh.boundary_edges()) {
    nodes.reserve(mesh.elements().size() * 4);
    for (int t = 0; t < mesh.element_count(); ++t) {
      const Element& e = mesh.elements()[t];
      nodes.push_back(Node{e.v, e.neighbor, e.generation, t});
      max_generation = std::max(max_generation, e.generation);
    }
    // Compatibly labeled meshes close within max_generation + 2 levels; the
    // slack term only matters for longest-edge labelings of raw input, whose
    // chains can run through the whole initial mesh once.
    depth_slack = 2 + 2 * mesh.element_count();
  }

  void repoint(int node, int from, int to) {
    if (node == kNoNeighbor) return;
    for (int& n : nodes[node].nbr)
      if (n == from) n = to;
  }

  // Bisect leaf t once (with its refinement-edge partner when the shared edge
  // is the partner's refinement edge too; otherwise the partner is bisected
  // first, which makes its child compatible).
  void bisect_leaf(int t, int depth) {
    if (depth > max_generation + depth_slack)
      throw std::runtime_error("conformity closure recursion exceeded its depth bound");
    if (!nodes[t].is_leaf()) return;

    int n = nodes[t].nbr[0];
    if (n != kNoNeighbor && nodes[n].nbr[0] != t) {
      bisect_leaf(n, depth + 1);
      n = nodes[t].nbr[0];
      if (n != kNoNeighbor && nodes[n].nbr[0] != t)
        throw std::runtime_error("conformity closure failed to align refinement edges");
    }

    const std::array<int, 3> tv = nodes[t].v;
    const std::array<int, 3> tn = nodes[t].nbr;
    const int gen = nodes[t].generation + 1;
    max_generation = std::max(max_generation, gen);

    const int m = static_cast<int>(verts.size());
    const Vertex& a = verts[tv[1]];
    const Vertex& b = verts[tv[2]];
    const bool edge_on_boundary = (n == kNoNeighbor);
    verts.push_back(Vertex{0.5 * (a.x + b.x), 0.5 * (a.y + b.y), edge_on_boundary});
    midpoint_edge.push_back({tv[1], tv[2]});
    if (edge_on_boundary) {
      boundary_edges.erase(sorted_edge(tv[1], tv[2]));
      boundary_edges.insert(sorted_edge(tv[1], m));
      boundary_edges.insert(sorted_edge(m, tv[2]));
    }

    const int tc1 = static_cast<int>(nodes.size());
    const int tc2 = tc1 + 1;
    int nc1 = -1, nc2 = -1;
    if (n != kNoNeighbor) {
      nc1 = tc2 + 1;
      nc2 = tc2 + 2;
    }

    // Children of t: (m, v0, v1) and (m, v2, v0); the new vertex is the peak
    // of both, so their refinement edges are the parent's remaining edges.
    nodes.push_back(Node{{m, tv[0], tv[1]}, {tn[2], nc2, tc2}, gen, nodes[t].ancestor});
    nodes.push_back(Node{{m, tv[2], tv[0]}, {tn[1], tc1, nc1}, gen, nodes[t].ancestor});
    repoint(tn[2], t, tc1);
    repoint(tn[1], t, tc2);
    nodes[t].child0 = tc1;
    nodes[t].child1 = tc2;

    if (n != kNoNeighbor) {
      const std::array<int, 3> nv = nodes[n].v;
      const std::array<int, 3> nn = nodes[n].nbr;
      if (nv[1] != tv[2] || nv[2] != tv[1])
        throw std::runtime_error("neighbor across refinement edge has inconsistent orientation");
      const int ngen = nodes[n].generation + 1;
      max_generation = std::max(max_generation, ngen);
      nodes.push_back(Node{{m, nv[0], nv[1]}, {nn[2], tc2, nc2}, ngen, nodes[n].ancestor});
      nodes.push_back(Node{{m, nv[2], nv[0]}, {nn[1], nc1, tc1}, ngen, nodes[n].ancestor});
      repoint(nn[2], n, nc1);
      repoint(nn[1], n, nc2);
      nodes[n].child0 = nc1;
      nodes[n].child1 = nc2;
    }
  }

  void ensure_depth(int t, int times) {
    if (times <= 0) return;
    if (nodes[t].is_leaf()) bisect_leaf(t, 0);
    const int c0 = nodes[t].child0;
    const int c1 = nodes[t].child1;
    ensure_depth(c0, times - 1);
    ensure_depth(c1, times - 1);
  }
};

}  // namespace

BisectResult bisect(const Mesh& mesh, const std::vector<int>& marked, int n) {
  if (n < 1) throw std::invalid_argument("bisect: n must be >= 1");
  for (int t : marked)
    if (t < 0 || t >= mesh.element_count())
      throw std::out_of_range("bisect: marked element index out of range");

  Forest forest(mesh);
  for (int t : marked) forest.ensure_depth(t, n);

  // Compact leaves (in node order) into the result mesh.
  std::vector<int> leaf_index(forest.nodes.size(), -1);
  std::vector<Element> elements;
  for (std::size_t i = 0; i < forest.nodes.size(); ++i) {
    if (forest.nodes[i].is_leaf()) {
      leaf_index[i] = static_cast<int>(elements.size());
      elements.push_back(Element{forest.nodes[i].v, {}, forest.nodes[i].generation});
    }
  }
  std::vector<std::vector<int>> children(mesh.element_count());
  for (std::size_t i = 0; i < forest.nodes.size(); ++i) {
    const auto& node = forest.nodes[i];
    if (!node.is_leaf()) continue;
    Element& e = elements[leaf_index[i]];
    for (int k = 0; k < 3; ++k)
      e.neighbor[k] = node.nbr[k] == kNoNeighbor ? kNoNeighbor : leaf_index[node.nbr[k]];
    children[node.ancestor].push_back(leaf_index[i]);
  }

  RefinementMap map;
  map.source_mesh_id = mesh.id();
  map.source_vertex_count = mesh.vertex_count();
  map.midpoint_edge = std::move(forest.midpoint_edge);
  map.children = std::move(children);

  Mesh out(std::move(forest.verts), std::move(elements), std::move(forest.boundary_edges));
  map.result_mesh_id = out.id();
  return {std::move(out), std::move(map)};
}

BisectResult uniform_refine(const Mesh& mesh, int n) {
  std::vector<int> all(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) all[t] = t;
  return bisect(mesh, all, n);
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

double mesh_size(const Mesh& mesh, int t) {
  if (t < 0 || t >= mesh.element_count()) throw std::out_of_range("mesh_size: bad element index");
  return std::sqrt(mesh.area(t));
}

std::vector<int> patch(const Mesh& mesh, int t) {
  if (t < 0 || t >= mesh.element_count()) throw std::out_of_range("patch: bad element index");
  std::vector<int> out{t};
  for (int n : mesh.elements()[t].neighbor)
    if (n != kNoNeighbor) out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

double audit_shape_regularity(const Mesh& mesh) {
  double worst = 0.0;
  for (int t = 0; t < mesh.element_count(); ++t) {
    const auto tr = mesh.triangle(t);
    const double l0 = norm(tr[2] - tr[1]);
    const double l1 = norm(tr[0] - tr[2]);
    const double l2 = norm(tr[1] - tr[0]);
    const double diam = std::max({l0, l1, l2});
    const double rho = 2.0 * mesh.area(t) / (l0 + l1 + l2);
    worst = std::max(worst, diam / rho);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Brute-force conformity oracle
// ---------------------------------------------------------------------------

namespace {

struct Classify {
  bool strictly_inside = false;
  bool on_open_edge = false;
};

// Position of point p relative to the closed triangle tr; tolerance scaled by
// the triangle size.
Classify classify_point(const std::array<Vec2, 3>& tr, Vec2 p, double scale) {
  const double eps = 1e-12 * scale;
  const double d0 = cross(tr[1] - tr[0], p - tr[0]);
  const double d1 = cross(tr[2] - tr[1], p - tr[1]);
  const double d2 = cross(tr[0] - tr[2], p - tr[2]);
  Classify c;
  if (d0 > eps && d1 > eps && d2 > eps) {
    c.strictly_inside = true;
    return c;
  }
  if (d0 < -eps || d1 < -eps || d2 < -eps) return c;  // outside
  // On the boundary of tr: on an open edge unless it coincides with a corner.
  for (const Vec2& q : tr)
    if (norm(p - q) <= eps) return c;
  c.on_open_edge = true;
  return c;
}

bool segments_cross_properly(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double scale) {
  const double eps = 1e-12 * scale;
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
         ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps));
}

}  // namespace

ConformityReport check_conformity(const Mesh& mesh) {
  ConformityReport report;
  const auto fail = [&](const std::string& what) {
    report.ok = false;
    report.detail = what;
  };

  for (int t = 0; t < mesh.element_count(); ++t) {
    if (!(mesh.area(t) > 0.0)) {
      fail("element " + std::to_string(t) + " has non-positive area");
      return report;
    }
    const Element& e = mesh.elements()[t];
    for (int i = 0; i < 3; ++i) {
      const int n = e.neighbor[i];
      if (n == kNoNeighbor) continue;
      const auto& nn = mesh.elements()[n].neighbor;
      if (std::count(nn.begin(), nn.end(), t) != 1) {
        fail("neighbor relation not symmetric between elements " + std::to_string(t) + " and " +
             std::to_string(n));
        return report;
      }
    }
  }

  // Duplicate-coordinate vertices would let two elements touch "at a vertex"
  // without sharing an index.
  {
    std::vector<int> order(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const auto& va = mesh.vertices()[a];
      const auto& vb = mesh.vertices()[b];
      return va.x != vb.x ? va.x < vb.x : va.y < vb.y;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
      const Vec2 d = mesh.point(order[i]) - mesh.point(order[i - 1]);
      if (norm(d) < 1e-14) {
        fail("vertices " + std::to_string(order[i - 1]) + " and " + std::to_string(order[i]) +
             " coincide");
        return report;
      }
    }
  }

  // Pairwise geometric test with a bounding-box prefilter.
  const int m = mesh.element_count();
  std::vector<std::array<double, 4>> boxes(m);  // xmin xmax ymin ymax
  std::vector<double> scales(m);
  for (int t = 0; t < m; ++t) {
    const auto tr = mesh.triangle(t);
    boxes[t] = {std::min({tr[0].x, tr[1].x, tr[2].x}), std::max({tr[0].x, tr[1].x, tr[2].x}),
                std::min({tr[0].y, tr[1].y, tr[2].y}), std::max({tr[0].y, tr[1].y, tr[2].y})};
    scales[t] = std::max(boxes[t][1] - boxes[t][0], boxes[t][3] - boxes[t][2]);
  }
  for (int s = 0; s < m; ++s) {
    for (int t = s + 1; t < m; ++t) {
      const double pad = 1e-12 * std::max(scales[s], scales[t]);
      if (boxes[s][1] + pad < boxes[t][0] || boxes[t][1] + pad < boxes[s][0] ||
          boxes[s][3] + pad < boxes[t][2] || boxes[t][3] + pad < boxes[s][2])
        continue;
      const auto trs = mesh.triangle(s);
      const auto trt = mesh.triangle(t);
      const double scale = std::max(scales[s], scales[t]);
      const auto& vs = mesh.elements()[s].v;
      const auto& vt = mesh.elements()[t].v;
      for (int i = 0; i < 3; ++i) {
        const Classify cs = classify_point(trt, trs[i], scale);
        const Classify ct = classify_point(trs, trt[i], scale);
        if (cs.strictly_inside || ct.strictly_inside) {
          fail("elements " + std::to_string(s) + " and " + std::to_string(t) + " overlap");
          return report;
        }
        if (cs.on_open_edge || ct.on_open_edge) {
          fail("hanging node between elements " + std::to_string(s) + " and " +
               std::to_string(t));
          return report;
        }
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (segments_cross_properly(trs[i], trs[(i + 1) % 3], trt[j], trt[(j + 1) % 3],
                                      scale)) {
            fail("edges of elements " + std::to_string(s) + " and " + std::to_string(t) +
                 " cross");
            return report;
          }
        }
      }
      // Shared vertices must be shared by index, and two shared indices must
      // form an edge registered as a neighbor relation.
      int shared = 0;
      for (int a : vs)
        for (int b : vt)
          if (a == b) ++shared;
      if (shared == 2) {
        const auto& nbr = mesh.elements()[s].neighbor;
        if (std::count(nbr.begin(), nbr.end(), t) != 1) {
          fail("elements " + std::to_string(s) + " and " + std::to_string(t) +
               " share an edge without a neighbor link");
          return report;
        }
      }
      if (shared == 3) {
        fail("elements " + std::to_string(s) + " and " + std::to_string(t) + " are identical");
        return report;
      }
    }
  }
  return report;
}

}  // namespace kacfem
