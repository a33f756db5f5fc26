#pragma once

#include <string>
#include <vector>

namespace kacfem {

enum class AuditStatus { pass, fail, skip };

struct AuditResult {
  std::string name;
  AuditStatus status = AuditStatus::pass;
  std::string detail;
};

struct AuditOptions {
  std::string only;  // run a single named check when non-empty
  int samples = 200;
  unsigned seed = 20240901;
};

/// Runtime invariant suite behind the `audit` subcommand. Checks:
///   conformity             refinement keeps meshes conforming, nested,
///                          area-conserving and shape regular
///   ellipticity            each catalog diffusivity matches its declared
///                          structural flags
///   lemma-key-property     J(v) - J(w) <= (a(w;v,v) - a(w;w,w)) / 2 for
///                          random pairs when alpha is decreasing
///   galerkin-orthogonality residual vanishes on the discrete space after
///                          every linearized solve
///   energy-monotonicity    F(u_k) non-increasing along adaptive runs with
///                          homogeneous boundary data and decreasing alpha
///   problem-consistency    primitives, derivatives and manufactured data
///                          agree with quadrature / finite-difference oracles
///   boundedness            discrete iterates stay inside the Poincare bound
std::vector<AuditResult> run_audit(const AuditOptions& options);

const std::vector<std::string>& audit_check_names();

}  // namespace kacfem
