#pragma once

#include "kacfem/assembly.hpp"

namespace kacfem {

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for the assembled SPD system:
/// ||b - A x|| / ||b|| <= tol, or x = 0 when b = 0. Dot products use pairwise
/// reduction, so results are reproducible. An optional initial guess (over the
/// free dofs) warm-starts the iteration.
struct CgResult {
  std::vector<double> x;
  SolveReport report;
};
CgResult cg_solve(const LinearSystem& system, double tol, int max_iter,
                  const std::vector<double>* initial_guess = nullptr);

/// One Kacanov step: assemble with the diffusivity frozen at u_prev, solve,
/// return lift + free-dof correction. The previous iterate warm-starts CG.
struct KacanovResult {
  P1Function u;
  SolveReport report;
};
KacanovResult kacanov_step(const Mesh& mesh, const P1Function& u_prev, const Problem& problem,
                           int quad_order, double cg_tol, int max_iter_factor = 10);

}  // namespace kacfem
