#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kacfem/mesh.hpp"

namespace kacfem {

/// Continuous piecewise-linear function as nodal values over mesh vertices.
struct P1Function {
  std::uint64_t mesh_id = 0;
  std::vector<double> coeffs;
};

P1Function zero_function(const Mesh& mesh);

/// Free (interior) degrees of freedom in ascending vertex order; boundary
/// vertices are constrained (their values live in the Dirichlet lift).
struct DofMap {
  std::vector<int> free;
  std::vector<int> index_of;  // vertex -> free slot, or -1 when constrained

  int free_count() const { return static_cast<int>(free.size()); }
};

DofMap make_dof_map(const Mesh& mesh);

/// Constant gradient of u on element t.
Vec2 gradient_on_element(const Mesh& mesh, const P1Function& u, int t);

/// Nodal (Lagrange) interpolant of g.
P1Function interpolate(const Mesh& mesh, const std::function<double(double, double)>& g);

/// Exact representation of u on a mesh refined from u's mesh: new midpoint
/// vertices take the average of the bisected edge's endpoint values.
P1Function prolong(const P1Function& u, const Mesh& old_mesh, const Mesh& new_mesh,
                   const RefinementMap& map);

/// (sum_T int_T |grad u_h - grad_exact|^2)^{1/2} by per-element quadrature.
double h1_seminorm_error(const Mesh& mesh, const P1Function& u_h,
                         const std::function<Vec2(double, double)>& grad_exact, int quad_order);

/// ||grad(u - v)|| for two functions on the same mesh (exact, the integrand is
/// piecewise constant).
double h1_seminorm_diff(const Mesh& mesh, const P1Function& u, const P1Function& v);

double h1_seminorm(const Mesh& mesh, const P1Function& u);

double max_abs_nodal(const P1Function& u);

/// Value of u at barycentric coordinates (l0,l1,l2) of element t.
double value_on_element(const Mesh& mesh, const P1Function& u, int t, double l0, double l1,
                        double l2);

}  // namespace kacfem
