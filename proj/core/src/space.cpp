#include "kacfem/space.hpp"

#include <cmath>
#include <stdexcept>

#include "kacfem/quadrature.hpp"
#include "kacfem/sums.hpp"

namespace kacfem {

namespace {

void require_same_mesh(const Mesh& mesh, const P1Function& u, const char* who) {
  if (u.mesh_id != mesh.id())
    throw std::invalid_argument(std::string(who) + ": function does not live on this mesh");
  if (static_cast<int>(u.coeffs.size()) != mesh.vertex_count())
    throw std::invalid_argument(std::string(who) + ": coefficient count mismatch");
}

}  // namespace

P1Function zero_function(const Mesh& mesh) {
  return P1Function{mesh.id(), std::vector<double>(mesh.vertex_count(), 0.0)};
}

DofMap make_dof_map(const Mesh& mesh) {
  DofMap dofs;
  dofs.index_of.assign(mesh.vertex_count(), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (!mesh.vertices()[v].on_boundary) {
      dofs.index_of[v] = static_cast<int>(dofs.free.size());
      dofs.free.push_back(v);
    }
  }
  return dofs;
}

Vec2 gradient_on_element(const Mesh& mesh, const P1Function& u, int t) {
  require_same_mesh(mesh, u, "gradient_on_element");
  const Element& e = mesh.elements()[t];
  const auto tr = mesh.triangle(t);
  const double a2 = 2.0 * signed_area(tr[0], tr[1], tr[2]);
  if (!(a2 > 0.0)) throw std::invalid_argument("gradient_on_element: degenerate element");
  Vec2 g{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = tr[(i + 1) % 3];
    const Vec2& pk = tr[(i + 2) % 3];
    const double c = u.coeffs[e.v[i]];
    g.x += c * (pj.y - pk.y) / a2;
    g.y += c * (pk.x - pj.x) / a2;
  }
  return g;
}

P1Function interpolate(const Mesh& mesh, const std::function<double(double, double)>& g) {
  P1Function out = zero_function(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vertex& p = mesh.vertices()[v];
    const double value = g(p.x, p.y);
    if (!std::isfinite(value))
      throw std::invalid_argument("interpolate: non-finite value at vertex " + std::to_string(v));
    out.coeffs[v] = value;
  }
  return out;
}

P1Function prolong(const P1Function& u, const Mesh& old_mesh, const Mesh& new_mesh,
                   const RefinementMap& map) {
  require_same_mesh(old_mesh, u, "prolong");
  if (map.source_mesh_id != old_mesh.id() || map.result_mesh_id != new_mesh.id())
    throw std::invalid_argument("prolong: refinement map does not connect these meshes");
  if (map.source_vertex_count != old_mesh.vertex_count())
    throw std::invalid_argument("prolong: refinement map vertex count mismatch");

  P1Function out;
  out.mesh_id = new_mesh.id();
  out.coeffs.resize(new_mesh.vertex_count());
  std::copy(u.coeffs.begin(), u.coeffs.end(), out.coeffs.begin());
  // Midpoints are recorded in creation order, so both endpoints are already
  // set when their midpoint is reached.
  for (std::size_t i = 0; i < map.midpoint_edge.size(); ++i) {
    const auto [a, b] = map.midpoint_edge[i];
    out.coeffs[map.source_vertex_count + i] = 0.5 * (out.coeffs[a] + out.coeffs[b]);
  }
  return out;
}

double h1_seminorm_error(const Mesh& mesh, const P1Function& u_h,
                         const std::function<Vec2(double, double)>& grad_exact, int quad_order) {
  require_same_mesh(mesh, u_h, "h1_seminorm_error");
  const TriQuadRule& rule = triangle_rule(quad_order);
  std::vector<double> per_element(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) {
    const auto tr = mesh.triangle(t);
    const Vec2 gh = gradient_on_element(mesh, u_h, t);
    const double area = mesh.area(t);
    double acc = 0.0;
    for (const TriQuadNode& q : rule.nodes) {
      const double x = q.l0 * tr[0].x + q.l1 * tr[1].x + q.l2 * tr[2].x;
      const double y = q.l0 * tr[0].y + q.l1 * tr[1].y + q.l2 * tr[2].y;
      const Vec2 d = gh - grad_exact(x, y);
      acc += q.w * dot(d, d);
    }
    per_element[t] = area * acc;
  }
  return std::sqrt(pairwise_sum(per_element));
}

double h1_seminorm_diff(const Mesh& mesh, const P1Function& u, const P1Function& v) {
  require_same_mesh(mesh, u, "h1_seminorm_diff");
  require_same_mesh(mesh, v, "h1_seminorm_diff");
  std::vector<double> per_element(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) {
    const Vec2 d = gradient_on_element(mesh, u, t) - gradient_on_element(mesh, v, t);
    per_element[t] = mesh.area(t) * dot(d, d);
  }
  return std::sqrt(pairwise_sum(per_element));
}

double h1_seminorm(const Mesh& mesh, const P1Function& u) {
  return h1_seminorm_diff(mesh, u, zero_function(mesh));
}

double max_abs_nodal(const P1Function& u) {
  double m = 0.0;
  for (double c : u.coeffs) m = std::max(m, std::abs(c));
  return m;
}

double value_on_element(const Mesh& mesh, const P1Function& u, int t, double l0, double l1,
                        double l2) {
  require_same_mesh(mesh, u, "value_on_element");
  const auto& v = mesh.elements()[t].v;
  return l0 * u.coeffs[v[0]] + l1 * u.coeffs[v[1]] + l2 * u.coeffs[v[2]];
}

}  // namespace kacfem
