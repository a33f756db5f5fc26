#pragma once

#include <vector>

#include "kacfem/problems.hpp"
#include "kacfem/space.hpp"

namespace kacfem {

/// Symmetric sparse matrix in CSR layout (both triangles stored).
struct SparseSymMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
  double inf_norm() const;
  std::vector<double> diagonal() const;
};

/// Kacanov-linearized system over the free dofs. The lift carries the
/// Dirichlet data (zero at free vertices); the assembled right-hand side
/// already contains the lift correction.
struct LinearSystem {
  SparseSymMatrix matrix;
  std::vector<double> rhs;
  P1Function lift;
  DofMap dofs;
};

/// Stiffness matrix with the diffusivity frozen at w: A_ij = sum_T alpha_T
/// int_T grad phi_i . grad phi_j, alpha_T = alpha(|grad w|_T^2). Load vector
/// from f by interior quadrature, minus the lift column. Throws when alpha or
/// f evaluates non-finite, naming the element.
LinearSystem assemble(const Mesh& mesh, const P1Function& w, const Problem& problem,
                      int quad_order);

/// 3x3 element stiffness for unit diffusivity (test and oracle helper).
std::array<std::array<double, 3>, 3> element_stiffness(const Mesh& mesh, int t);

/// Load vector over all vertices: l_i = int_Omega f phi_i.
std::vector<double> assemble_load_all(const Mesh& mesh, const Problem& problem, int quad_order);

/// a(w; u, v) = sum_T alpha(|grad w|_T^2) |T| grad u . grad v (exact for the
/// catalog, the integrand is piecewise constant).
double apply_form(const Mesh& mesh, const P1Function& w, const P1Function& u,
                  const P1Function& v, const Problem& problem);

/// L(v) = int_Omega f v by per-element quadrature.
double load_functional(const Mesh& mesh, const Problem& problem, const P1Function& v,
                       int quad_order);

/// Energy F(u) = 1/2 sum_T |T| A(|grad u|_T^2) - L(u), with A the registered
/// primitive of alpha. Throws when the problem has no primitive.
double energy(const Mesh& mesh, const P1Function& u, const Problem& problem, int quad_order);

/// J(u) = 1/2 sum_T |T| A(|grad u|_T^2), the potential part of the energy.
double energy_potential(const Mesh& mesh, const P1Function& u, const Problem& problem);

}  // namespace kacfem
