#include "kacfem/driver.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "kacfem/estimator.hpp"
#include "kacfem/problems.hpp"

namespace kacfem {

RunResult run_adaptive(const RunConfig& config,
                       const std::function<void(int, const Mesh&)>& mesh_hook) {
  return run_adaptive(catalog(config.problem), config, mesh_hook);
}

RunResult run_adaptive(const Problem& problem, const RunConfig& config,
                       const std::function<void(int, const Mesh&)>& mesh_hook) {
  Mesh mesh = initial_mesh(problem);
  P1Function u_prev = zero_function(mesh);

  RunResult result;
  for (int k = 1;; ++k) {
    KacanovResult step = kacanov_step(mesh, u_prev, problem, config.quad_order, config.cg_tol);
    if (!step.report.converged) {
      result.status = RunStatus::solver_failure;
      return result;
    }
    const LocalEstimates est = estimate(mesh, u_prev, step.u, problem, config.quad_order);

    IterationRecord rec;
    rec.k = k;
    rec.dofs = make_dof_map(mesh).free_count();
    rec.elements = mesh.element_count();
    rec.global_eta = est.global;
    rec.energy = energy(mesh, step.u, problem, config.quad_order);
    if (problem.has_exact())
      rec.h1_error = h1_seminorm_error(mesh, step.u, problem.exact_grad, config.quad_order);
    rec.succ_diff = h1_seminorm_diff(mesh, step.u, u_prev);
    rec.solve_iters = step.report.iterations;
    rec.max_abs_nodal = max_abs_nodal(step.u);
    result.records.push_back(rec);
    if (mesh_hook) mesh_hook(k, mesh);

    if (est.global <= config.eta_tol) {
      result.status = RunStatus::converged_eta;
      return result;
    }
    if (rec.dofs > config.max_dofs) {
      result.status = RunStatus::reached_max_dofs;
      return result;
    }
    if (k >= config.max_iterations) {
      result.status = RunStatus::reached_max_iterations;
      return result;
    }

    const std::vector<int> marked = mark(est, config.marking);
    BisectResult refined = bisect(mesh, marked, config.n_bisect);
    u_prev = prolong(step.u, mesh, refined.mesh, refined.map);
    mesh = std::move(refined.mesh);
  }
}

double fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_loglog: need at least two points");
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissae");
  return sxy / sxx;
}

namespace {

double fit_on(const std::vector<const IterationRecord*>& recs) {
  if (recs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 records with errors");
  std::vector<double> xs, ys;
  xs.reserve(recs.size());
  ys.reserve(recs.size());
  for (const IterationRecord* r : recs) {
    xs.push_back(static_cast<double>(r->dofs));
    ys.push_back(*r->h1_error);
  }
  return fit_loglog(xs, ys);
}

}  // namespace

double fit_rate(const std::vector<IterationRecord>& records, int window) {
  std::vector<const IterationRecord*> with_error;
  for (const IterationRecord& r : records)
    if (r.h1_error && *r.h1_error > 0.0 && r.dofs > 0) with_error.push_back(&r);
  if (window < static_cast<int>(with_error.size()))
    with_error.erase(with_error.begin(), with_error.end() - window);
  return fit_on(with_error);
}

double fit_rate_final_decade(const std::vector<IterationRecord>& records) {
  int max_dofs = 0;
  for (const IterationRecord& r : records)
    if (r.h1_error) max_dofs = std::max(max_dofs, r.dofs);
  std::vector<const IterationRecord*> window;
  for (const IterationRecord& r : records)
    if (r.h1_error && *r.h1_error > 0.0 && r.dofs > 0 && 10 * r.dofs >= max_dofs)
      window.push_back(&r);
  return fit_on(window);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << "k,dofs,elements,eta,energy,h1_error,succ_diff,solve_iters\n";
  for (const IterationRecord& r : records) {
    out << r.k << ',' << r.dofs << ',' << r.elements << ',' << fmt17(r.global_eta) << ','
        << fmt17(r.energy) << ',';
    if (r.h1_error) out << fmt17(*r.h1_error);
    out << ',' << fmt17(r.succ_diff) << ',' << r.solve_iters << '\n';
  }
}

std::string records_to_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream out;
  write_records_csv(out, records);
  return out.str();
}

std::vector<IterationRecord> parse_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty CSV");
  if (line.rfind("k,dofs,elements,eta,energy,h1_error", 0) != 0)
    throw CsvError("unexpected CSV header: " + line);
  std::vector<IterationRecord> records;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      fields.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (fields.size() != 8)
      throw CsvError("line " + std::to_string(lineno) + ": expected 8 fields");
    try {
      IterationRecord r;
      r.k = std::stoi(fields[0]);
      r.dofs = std::stoi(fields[1]);
      r.elements = std::stoi(fields[2]);
      r.global_eta = std::stod(fields[3]);
      r.energy = std::stod(fields[4]);
      if (!fields[5].empty()) r.h1_error = std::stod(fields[5]);
      r.succ_diff = std::stod(fields[6]);
      r.solve_iters = std::stoi(fields[7]);
      records.push_back(r);
    } catch (const std::exception&) {
      throw CsvError("line " + std::to_string(lineno) + ": malformed field");
    }
  }
  return records;
}

}  // namespace kacfem
