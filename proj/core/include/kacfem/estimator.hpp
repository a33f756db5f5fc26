#pragma once

#include "kacfem/assembly.hpp"

namespace kacfem {

struct LocalEstimates {
  std::vector<double> eta;  // per element, >= 0
  double global = 0.0;      // (sum eta^2)^{1/2}
};

/// Residual estimator for the linearized operator with weight frozen at
/// u_prev: eta^2(T) = H_T^2 ||R||_T^2 + H_T ||J||_{dT}^2 with element residual
/// R = -f on T (the discrete flux is piecewise constant) and jump residual
/// J = 1/2 [flux_T . n + flux_T' . n'] on interior sides, zero on boundary
/// sides. Jumps are integrated exactly; the interior term uses quadrature of
/// f^2.
LocalEstimates estimate(const Mesh& mesh, const P1Function& u_prev, const P1Function& u_curr,
                        const Problem& problem, int quad_order);

/// Residual functional <R(u_curr), v> = a(u_prev; u_curr, v) - L(v) for a test
/// function v on a refinement of the mesh, evaluated on the fine mesh. Throws
/// when v does not live on the refinement described by the map.
double residual_pairing(const Mesh& mesh, const P1Function& u_prev, const P1Function& u_curr,
                        const Problem& problem, const Mesh& fine_mesh, const RefinementMap& map,
                        const P1Function& v, int quad_order);

}  // namespace kacfem
