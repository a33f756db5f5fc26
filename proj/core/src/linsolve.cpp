#include "kacfem/linsolve.hpp"

#include <cmath>
#include <stdexcept>

#include "kacfem/sums.hpp"

namespace kacfem {

CgResult cg_solve(const LinearSystem& system, double tol, int max_iter,
                  const std::vector<double>* initial_guess) {
  if (!(tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be positive");
  const SparseSymMatrix& A = system.matrix;
  const std::vector<double>& b = system.rhs;
  const int n = A.n;

  CgResult out;
  out.x.assign(n, 0.0);
  if (n == 0) {
    out.report.converged = true;
    return out;
  }

  std::vector<double> scratch(n);
  const auto dotp = [&](const std::vector<double>& u, const std::vector<double>& v) {
    return pairwise_dot(u, v, scratch);
  };

  const double bnorm = std::sqrt(dotp(b, b));
  if (bnorm == 0.0) {
    out.report.converged = true;
    return out;
  }

  if (initial_guess) {
    if (static_cast<int>(initial_guess->size()) != n)
      throw std::invalid_argument("cg_solve: initial guess size mismatch");
    out.x = *initial_guess;
  }

  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw std::runtime_error("cg_solve: non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), Ap(n);
  A.multiply(out.x, Ap);
  for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];

  double rnorm = std::sqrt(dotp(r, r));
  int iterations = 0;
  double rz = 0.0;
  bool fresh_direction = true;
  while (rnorm / bnorm > tol && iterations < max_iter) {
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dotp(r, z);
    if (fresh_direction) {
      p = z;
      fresh_direction = false;
    } else {
      const double beta = rz_next / rz;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rz = rz_next;
    A.multiply(p, Ap);
    const double pAp = dotp(p, Ap);
    if (!(pAp > 0.0)) throw std::runtime_error("cg_solve: matrix is not positive definite");
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      out.x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    ++iterations;
    rnorm = std::sqrt(dotp(r, r));
    // Guard against recurrence drift: recompute the true residual when the
    // recurrence claims convergence.
    if (rnorm / bnorm <= tol) {
      A.multiply(out.x, Ap);
      for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
      rnorm = std::sqrt(dotp(r, r));
      fresh_direction = true;
    }
  }

  out.report.iterations = iterations;
  out.report.final_relative_residual = rnorm / bnorm;
  out.report.converged = (rnorm / bnorm <= tol);
  return out;
}

KacanovResult kacanov_step(const Mesh& mesh, const P1Function& u_prev, const Problem& problem,
                           int quad_order, double cg_tol, int max_iter_factor) {
  LinearSystem sys = assemble(mesh, u_prev, problem, quad_order);
  const int n = sys.dofs.free_count();
  std::vector<double> guess(n);
  for (int i = 0; i < n; ++i) guess[i] = u_prev.coeffs[sys.dofs.free[i]];
  const int max_iter = std::max(50, max_iter_factor * n);
  CgResult cg = cg_solve(sys, cg_tol, max_iter, &guess);

  KacanovResult out;
  out.report = cg.report;
  out.u = std::move(sys.lift);
  for (int i = 0; i < n; ++i) out.u.coeffs[sys.dofs.free[i]] = cg.x[i];
  return out;
}

}  // namespace kacfem
