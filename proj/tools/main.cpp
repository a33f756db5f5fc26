#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kacfem/audit.hpp"
#include "kacfem/driver.hpp"
#include "kacfem/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 2;
constexpr int kExitUsage = 64;
constexpr int kExitBadData = 65;

struct RunFlags {
  kacfem::RunConfig config;
  std::string marking_spec = "max:0.7";
  std::string out_dir = ".";
  bool dump_meshes = false;
};

void add_run_options(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("--problem", flags.config.problem,
                 "Problem name (ex1 ex2 ex3 ex4 curvature poisson)");
  cmd.add_option("--mark", flags.marking_spec, "Marking strategy: global, max:T or doerfler:T");
  cmd.add_option("--n-bisect", flags.config.n_bisect, "Bisections per marked element (>= 1)");
  cmd.add_option("--eta-tol", flags.config.eta_tol, "Stop when the global estimator drops below");
  cmd.add_option("--max-dofs", flags.config.max_dofs, "Stop when the dof count exceeds");
  cmd.add_option("--max-iters", flags.config.max_iterations, "Iteration cap");
  cmd.add_option("--quad-order", flags.config.quad_order, "Quadrature order (1, 2 or 5)");
  cmd.add_option("--cg-tol", flags.config.cg_tol, "Relative residual tolerance of the solver");
  cmd.add_option("--out", flags.out_dir, "Output directory for records.csv and dumps");
  cmd.add_flag("--dump-meshes", flags.dump_meshes, "Write mesh_NNNN.txt per iteration");
}

int cmd_run(const RunFlags& flags) {
  kacfem::RunConfig config = flags.config;
  config.marking = kacfem::parse_marking(flags.marking_spec);
  if (config.n_bisect < 1) throw CLI::ValidationError("--n-bisect must be >= 1");

  std::filesystem::create_directories(flags.out_dir);
  std::function<void(int, const kacfem::Mesh&)> hook;
  if (flags.dump_meshes) {
    hook = [&flags](int k, const kacfem::Mesh& mesh) {
      char name[32];
      std::snprintf(name, sizeof(name), "mesh_%04d.txt", k);
      kacfem::write_mesh_file(flags.out_dir + "/" + name, mesh);
    };
  }

  const kacfem::RunResult result = kacfem::run_adaptive(config, hook);

  const std::string csv_path = flags.out_dir + "/records.csv";
  std::ofstream csv(csv_path);
  if (!csv) {
    std::cerr << "cannot open " << csv_path << " for writing\n";
    return kExitBadData;
  }
  kacfem::write_records_csv(csv, result.records);

  if (!result.records.empty()) {
    const kacfem::IterationRecord& last = result.records.back();
    std::cout << "problem " << config.problem << ", marking "
              << kacfem::marking_to_string(config.marking) << ": " << result.records.size()
              << " iterations, final dofs " << last.dofs << ", eta " << last.global_eta
              << ", max |u| " << last.max_abs_nodal << "\n";
  }
  std::cout << "records written to " << csv_path << "\n";

  if (result.status == kacfem::RunStatus::solver_failure) {
    std::cerr << "linear solver failed; partial records flushed\n";
    return kExitSolverFailure;
  }
  return kExitOk;
}

int cmd_rates(const std::string& csv_path, int window) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open " << csv_path << "\n";
    return kExitBadData;
  }
  std::vector<kacfem::IterationRecord> records;
  try {
    records = kacfem::parse_records_csv(in);
  } catch (const kacfem::CsvError& err) {
    std::cerr << "malformed CSV: " << err.what() << "\n";
    return kExitBadData;
  }

  std::printf("%5s %9s %9s %13s %13s %13s\n", "k", "dofs", "elements", "eta", "h1_error",
              "succ_diff");
  for (const kacfem::IterationRecord& r : records) {
    if (r.h1_error)
      std::printf("%5d %9d %9d %13.6e %13.6e %13.6e\n", r.k, r.dofs, r.elements, r.global_eta,
                  *r.h1_error, r.succ_diff);
    else
      std::printf("%5d %9d %9d %13.6e %13s %13.6e\n", r.k, r.dofs, r.elements, r.global_eta, "",
                  r.succ_diff);
  }

  bool has_errors = false;
  for (const auto& r : records) has_errors = has_errors || r.h1_error.has_value();
  try {
    if (has_errors) {
      std::printf("h1_error slope (last %d records): %.4f\n", window,
                  kacfem::fit_rate(records, window));
      std::printf("h1_error slope (final decade):    %.4f\n",
                  kacfem::fit_rate_final_decade(records));
    } else {
      // No exact solution in this run; report the estimator trend instead.
      std::vector<double> xs, ys;
      for (const auto& r : records)
        if (r.global_eta > 0.0) {
          xs.push_back(r.dofs);
          ys.push_back(r.global_eta);
        }
      const int n = static_cast<int>(xs.size());
      const int w = std::min(window, n);
      if (w >= 3)
        std::printf("eta slope (last %d records): %.4f\n", w,
                    kacfem::fit_loglog({xs.data() + n - w, static_cast<std::size_t>(w)},
                                       {ys.data() + n - w, static_cast<std::size_t>(w)}));
    }
  } catch (const std::exception& err) {
    std::cerr << "rate fit failed: " << err.what() << "\n";
    return kExitBadData;
  }
  return kExitOk;
}

int cmd_audit(const kacfem::AuditOptions& options) {
  std::vector<kacfem::AuditResult> results;
  try {
    results = kacfem::run_audit(options);
  } catch (const std::invalid_argument& err) {
    std::cerr << err.what() << "\n";
    return kExitUsage;
  }
  bool any_fail = false;
  for (const kacfem::AuditResult& r : results) {
    const char* tag = r.status == kacfem::AuditStatus::pass   ? "PASS"
                      : r.status == kacfem::AuditStatus::skip ? "SKIP"
                                                              : "FAIL";
    std::printf("%-4s %-24s %s\n", tag, r.name.c_str(), r.detail.c_str());
    any_fail = any_fail || r.status == kacfem::AuditStatus::fail;
  }
  return any_fail ? 1 : kExitOk;
}

int cmd_dump_mesh(const std::string& problem, int uniform, const std::string& out_path) {
  kacfem::Mesh mesh = kacfem::initial_mesh(kacfem::catalog(problem));
  if (uniform > 0) mesh = kacfem::uniform_refine(mesh, uniform).mesh;
  if (out_path == "-") {
    kacfem::write_mesh(std::cout, mesh);
  } else {
    kacfem::write_mesh_file(out_path, mesh);
    std::cout << "mesh with " << mesh.vertex_count() << " vertices / " << mesh.element_count()
              << " elements written to " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Kacanov finite element solver for quasi-linear diffusion"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run the adaptive loop, write records.csv");
  add_run_options(*run, run_flags);

  std::string rates_csv = "records.csv";
  int rates_window = 8;
  CLI::App* rates = app.add_subcommand("rates", "Print a convergence table and fitted slopes");
  rates->add_option("csv", rates_csv, "records.csv produced by `run`");
  rates->add_option("--window", rates_window, "Number of trailing records for the fit");

  kacfem::AuditOptions audit_options;
  CLI::App* audit = app.add_subcommand("audit", "Run the runtime invariant suite");
  audit->add_option("--only", audit_options.only, "Run a single named check");
  audit->add_option("--samples", audit_options.samples, "Random samples per property");
  audit->add_option("--seed", audit_options.seed, "RNG seed");

  std::string dump_problem = "ex1";
  int dump_uniform = 0;
  std::string dump_out = "-";
  CLI::App* dump = app.add_subcommand("dump-mesh", "Write a problem's mesh in dump format");
  dump->add_option("--problem", dump_problem, "Problem name");
  dump->add_option("--uniform", dump_uniform, "Uniform refinement rounds before dumping");
  dump->add_option("--out", dump_out, "Output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (rates->parsed()) return cmd_rates(rates_csv, rates_window);
    if (audit->parsed()) return cmd_audit(audit_options);
    if (dump->parsed()) return cmd_dump_mesh(dump_problem, dump_uniform, dump_out);
  } catch (const CLI::ValidationError& err) {
    std::cerr << err.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
