#include "kacfem/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "kacfem/quadrature.hpp"
#include "kacfem/sums.hpp"

namespace kacfem {

LocalEstimates estimate(const Mesh& mesh, const P1Function& u_prev, const P1Function& u_curr,
                        const Problem& problem, int quad_order) {
  if (u_prev.mesh_id != mesh.id() || u_curr.mesh_id != mesh.id())
    throw std::invalid_argument("estimate: functions do not live on this mesh");

  const TriQuadRule& rule = triangle_rule(quad_order);
  const int m = mesh.element_count();

  std::vector<Vec2> flux(m);
  for (int t = 0; t < m; ++t) {
    const Vec2 gw = gradient_on_element(mesh, u_prev, t);
    const double alpha_t = problem.alpha(dot(gw, gw));
    flux[t] = alpha_t * gradient_on_element(mesh, u_curr, t);
  }

  LocalEstimates est;
  est.eta.assign(m, 0.0);
  std::vector<double> eta_sq(m, 0.0);
  for (int t = 0; t < m; ++t) {
    const auto tr = mesh.triangle(t);
    const double area = mesh.area(t);
    const double h = std::sqrt(area);

    double f_sq = 0.0;
    for (const TriQuadNode& q : rule.nodes) {
      const double x = q.l0 * tr[0].x + q.l1 * tr[1].x + q.l2 * tr[2].x;
      const double y = q.l0 * tr[0].y + q.l1 * tr[1].y + q.l2 * tr[2].y;
      const double fv = problem.f(x, y);
      f_sq += q.w * fv * fv;
    }
    double eta2 = h * h * area * f_sq;

    const Element& e = mesh.elements()[t];
    for (int i = 0; i < 3; ++i) {
      const int n = e.neighbor[i];
      if (n == kNoNeighbor) continue;  // boundary side: J = 0
      const Vec2 a = tr[(i + 1) % 3];
      const Vec2 b = tr[(i + 2) % 3];
      const Vec2 d = b - a;
      const double len = norm(d);
      const Vec2 outward{d.y / len, -d.x / len};
      const double jump = 0.5 * dot(flux[t] - flux[n], outward);
      eta2 += h * len * jump * jump;
    }
    eta_sq[t] = eta2;
    est.eta[t] = std::sqrt(eta2);
  }
  est.global = std::sqrt(pairwise_sum(eta_sq));
  return est;
}

double residual_pairing(const Mesh& mesh, const P1Function& u_prev, const P1Function& u_curr,
                        const Problem& problem, const Mesh& fine_mesh, const RefinementMap& map,
                        const P1Function& v, int quad_order) {
  if (v.mesh_id != fine_mesh.id())
    throw std::invalid_argument("residual_pairing: v does not live on the fine mesh");
  if (map.source_mesh_id != mesh.id() || map.result_mesh_id != fine_mesh.id())
    throw std::invalid_argument("residual_pairing: fine mesh is not a refinement of the mesh");

  const P1Function wp = prolong(u_prev, mesh, fine_mesh, map);
  const P1Function uc = prolong(u_curr, mesh, fine_mesh, map);
  return apply_form(fine_mesh, wp, uc, v, problem) -
         load_functional(fine_mesh, problem, v, quad_order);
}

}  // namespace kacfem
