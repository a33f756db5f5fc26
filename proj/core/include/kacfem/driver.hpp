#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kacfem/linsolve.hpp"
#include "kacfem/marking.hpp"

namespace kacfem {

struct IterationRecord {
  int k = 0;
  int dofs = 0;
  int elements = 0;
  double global_eta = 0.0;
  double energy = 0.0;
  std::optional<double> h1_error;  // only when the problem has an exact gradient
  double succ_diff = 0.0;          // ||grad(u_k - prolong(u_{k-1}))||
  int solve_iters = 0;
  double max_abs_nodal = 0.0;      // diagnostic, not part of the CSV schema
};

struct RunConfig {
  std::string problem = "ex1";
  MarkingRule marking{MarkingKind::maximum, 0.7};
  int n_bisect = 1;
  double eta_tol = 1e-6;
  int max_dofs = 500000;
  int max_iterations = 60;
  int quad_order = 5;
  double cg_tol = 1e-10;
};

enum class RunStatus { converged_eta, reached_max_dofs, reached_max_iterations, solver_failure };

struct RunResult {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::reached_max_iterations;
};

/// Adaptive loop: solve (one Kacanov step, warm-started from the prolonged
/// previous iterate), estimate with the (u_{k-1}, u_k) pair, mark, refine.
/// The first solve happens on the initial mesh. Stops when the global
/// estimate drops below eta_tol, the dof count exceeds max_dofs, the
/// iteration cap is hit, or the linear solver fails (records collected so far
/// are returned in every case). The optional hook sees each mesh after its
/// record is taken.
RunResult run_adaptive(const RunConfig& config,
                       const std::function<void(int, const Mesh&)>& mesh_hook = {});

/// Same loop for a problem object that is not in the catalog (config.problem
/// is ignored).
RunResult run_adaptive(const Problem& problem, const RunConfig& config,
                       const std::function<void(int, const Mesh&)>& mesh_hook = {});

/// Least-squares slope of a log-log fit.
double fit_loglog(std::span<const double> xs, std::span<const double> ys);

/// Slope of log(h1_error) vs log(dofs) over the last `window` records that
/// carry an error value. Throws when fewer than 3 such records exist.
double fit_rate(const std::vector<IterationRecord>& records, int window);

/// Same fit restricted to records with dofs >= max_dofs_reached / 10.
double fit_rate_final_decade(const std::vector<IterationRecord>& records);

/// CSV schema: "k,dofs,elements,eta,energy,h1_error,succ_diff,solve_iters",
/// floats with 17 significant digits, h1_error empty when unavailable.
void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records);
std::string records_to_csv(const std::vector<IterationRecord>& records);

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::vector<IterationRecord> parse_records_csv(std::istream& in);

}  // namespace kacfem
