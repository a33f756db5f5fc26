// Acceptance suite: runs every shipped benchmark scenario end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero when any criterion
// fails. Individual criteria can be selected with --criterion N.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kacfem/audit.hpp"
#include "kacfem/driver.hpp"
#include "kacfem/io.hpp"
#include "support/oracles.hpp"

using namespace kacfem;

namespace {

struct Criterion {
  int id;
  std::string description;
  bool passed;
  std::string detail;
};

std::vector<Criterion> g_results;

void record(int id, const std::string& description, bool passed, const std::string& detail) {
  g_results.push_back({id, description, passed, detail});
  std::printf("[%s] criterion %2d: %s — %s\n", passed ? "PASS" : "FAIL", id, description.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Benchmark runs shared between criteria, keyed by problem/marking.
class RunCache {
 public:
  const RunResult& get(const std::string& problem, const MarkingRule& marking, int max_dofs,
                       const std::function<void(int, const Mesh&)>& hook = {}) {
    const std::string key = problem + "/" + marking_to_string(marking);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      RunConfig config;
      config.problem = problem;
      config.marking = marking;
      config.eta_tol = 1e-6;
      config.max_dofs = max_dofs;
      config.max_iterations = 500;
      it = cache_.emplace(key, run_adaptive(config, hook)).first;
    }
    return it->second;
  }

 private:
  std::map<std::string, RunResult> cache_;
};

RunCache g_runs;
constexpr int kMaxDofs = 100000;

bool audit_passes(const std::string& name, int samples, std::string& detail) {
  AuditOptions options;
  options.only = name;
  options.samples = samples;
  const std::vector<AuditResult> results = run_audit(options);
  bool ok = true;
  for (const AuditResult& r : results) {
    ok = ok && r.status != AuditStatus::fail;
    detail = r.detail;
  }
  return ok;
}

void criterion_1() {
  bool ok = true;
  std::string detail;
  for (const MarkingRule rule :
       {MarkingRule{MarkingKind::maximum, 0.7}, MarkingRule{MarkingKind::doerfler, 0.5}}) {
    const RunResult& run = g_runs.get("ex1", rule, kMaxDofs);
    const double slope = fit_rate_final_decade(run.records);
    detail += marking_to_string(rule) + ": slope " + fmt(slope) + " (dofs " +
              std::to_string(run.records.back().dofs) + "); ";
    ok = ok && slope >= -0.60 && slope <= -0.40;
  }
  record(1, "ex1 adaptive rate in [-0.60,-0.40] (max:0.7 and doerfler:0.5)", ok, detail);
}

void criterion_2() {
  const RunResult& run = g_runs.get("ex1", {MarkingKind::global, 1.0}, kMaxDofs);
  const double slope = fit_rate_final_decade(run.records);
  record(2, "ex1 uniform rate in [-0.40,-0.27] (global)", slope >= -0.40 && slope <= -0.27,
         "slope " + fmt(slope));
}

void criterion_3() {
  std::string detail;
  const bool ok = audit_passes("energy-monotonicity", 200, detail);
  record(3, "energy non-increasing on homogenized ex1 (slack 1e-10)", ok, detail);
}

void criterion_4() {
  std::string detail;
  const bool ok = audit_passes("lemma-key-property", 500, detail);
  record(4, "key-property inequality, 500 random pairs (ex1/ex2/ex4)", ok, detail);
}

void criterion_5() {
  std::string detail;
  const bool ok = audit_passes("galerkin-orthogonality", 200, detail);
  record(5, "Galerkin orthogonality after every linearized solve", ok, detail);
}

void criterion_6() {
  const RunResult& run = g_runs.get("ex1", {MarkingKind::maximum, 0.7}, kMaxDofs);
  std::optional<double> at2, at25;
  for (const IterationRecord& r : run.records) {
    if (r.k == 2) at2 = r.succ_diff;
    if (r.k == 25) at25 = r.succ_diff;
  }
  if (!at2 || !at25) {
    record(6, "successive-iterate decay ||grad(u25-u24)|| <= ||grad(u2-u1)||/50", false,
           "run shorter than 25 iterations");
    return;
  }
  record(6, "successive-iterate decay ||grad(u25-u24)|| <= ||grad(u2-u1)||/50",
         *at25 <= *at2 / 50.0, "ratio " + fmt(*at2 / *at25) + "x");
}

void criterion_7() {
  const RunResult& run = g_runs.get("ex2", {MarkingKind::maximum, 0.7}, kMaxDofs);
  double eta_first = 0.0;
  for (const IterationRecord& r : run.records) {
    if (r.global_eta > 0.0) {
      eta_first = r.global_eta;
      break;
    }
  }
  const double eta_last = run.records.back().global_eta;
  const int max_dofs_reached = run.records.back().dofs;
  double min_h1 = 1e300;
  for (const IterationRecord& r : run.records)
    if (r.h1_error && 10 * r.dofs >= max_dofs_reached) min_h1 = std::min(min_h1, *r.h1_error);
  const bool ok = eta_first >= 100.0 * eta_last && min_h1 > 1e-3;
  record(7, "ex2: estimator falls >=100x while the H1 error stagnates above 1e-3", ok,
         "eta " + fmt(eta_first) + " -> " + fmt(eta_last) + " (" + fmt(eta_first / eta_last) +
             "x), final-decade error >= " + fmt(min_h1));
}

void criterion_8() {
  const RunResult& run = g_runs.get("ex3", {MarkingKind::maximum, 0.7}, kMaxDofs);
  const double slope = fit_rate_final_decade(run.records);
  record(8, "ex3 (increasing alpha) adaptive rate in [-0.60,-0.40]",
         slope >= -0.60 && slope <= -0.40, "slope " + fmt(slope));
}

void criterion_9() {
  const RunResult& run = g_runs.get("ex4", {MarkingKind::maximum, 0.7}, kMaxDofs);
  const double slope = fit_rate_final_decade(run.records);
  record(9, "ex4 (non-Lipschitz alpha) adaptive rate in [-0.60,-0.40]",
         slope >= -0.60 && slope <= -0.40, "slope " + fmt(slope));
}

void criterion_10() {
  namespace fs = std::filesystem;
  const fs::path dump_dir = fs::temp_directory_path() / "kacfem_acceptance_curvature";
  fs::create_directories(dump_dir);
  const auto hook = [&dump_dir](int k, const Mesh& mesh) {
    if (k == 10 || k == 15 || k == 20) {
      char name[32];
      std::snprintf(name, sizeof(name), "mesh_%04d.txt", k);
      write_mesh_file((dump_dir / name).string(), mesh);
    }
  };
  const RunResult& run = g_runs.get("curvature", {MarkingKind::doerfler, 0.5}, kMaxDofs, hook);

  const bool reached = run.records.back().dofs > kMaxDofs;
  double at_1e4 = 0.0;
  for (const IterationRecord& r : run.records) {
    if (r.dofs >= 10000) {
      at_1e4 = r.max_abs_nodal;
      break;
    }
  }
  double final_max = run.records.back().max_abs_nodal;
  bool dumps_exist = true;
  for (int k : {10, 15, 20}) {
    char name[32];
    std::snprintf(name, sizeof(name), "mesh_%04d.txt", k);
    dumps_exist = dumps_exist && fs::exists(dump_dir / name);
  }
  const bool bounded = at_1e4 > 0.0 && final_max <= 2.0 * at_1e4;
  record(10, "curvature reaches 1e5 dofs with bounded max nodal value; ring mesh dumps written",
         reached && bounded && dumps_exist,
         "max |u| " + fmt(at_1e4) + " at 1e4 dofs -> " + fmt(final_max) + " at " +
             std::to_string(run.records.back().dofs) + " dofs; dumps in " + dump_dir.string());
}

void criterion_11() {
  std::mt19937_64 rng(71);
  bool ok = true;
  std::string detail;

  // (a) CG vs dense Cholesky in the A-norm on systems <= 500 dofs.
  for (const char* name : {"poisson", "ex1"}) {
    const Problem p = catalog(name);
    Mesh mesh = initial_mesh(p);
    while (make_dof_map(mesh).free_count() < 250) mesh = uniform_refine(mesh, 1).mesh;
    const P1Function w = oracles::random_p1(mesh, rng, 0.5, false);
    const LinearSystem sys = assemble(mesh, w, p, 5);
    const CgResult cg = cg_solve(sys, 1e-12, 10 * sys.matrix.n);
    const std::vector<double> exact = oracles::dense_cholesky_solve(sys.matrix, sys.rhs);
    std::vector<double> diff(sys.matrix.n);
    for (int i = 0; i < sys.matrix.n; ++i) diff[i] = cg.x[i] - exact[i];
    const double err = oracles::a_norm(sys.matrix, diff);
    const double scale = std::max(1.0, oracles::a_norm(sys.matrix, exact));
    ok = ok && cg.report.converged && err <= 1e-8 * scale;
    detail += std::string(name) + " A-norm gap " + fmt(err) + "; ";
  }

  // (b) alpha = 1 estimator against the independent Laplacian implementation.
  {
    const Problem p = catalog("poisson");
    Mesh mesh = uniform_refine(make_lshape_mesh(), 2).mesh;
    P1Function u_prev = zero_function(mesh);
    double worst = 0.0;
    for (int round = 0; round < 3; ++round) {
      const KacanovResult step = kacanov_step(mesh, u_prev, p, 5, 1e-12);
      const LocalEstimates est = estimate(mesh, u_prev, step.u, p, 5);
      const std::vector<double> reference =
          oracles::laplace_residual_estimator(mesh, step.u, p.f, 5);
      for (std::size_t t = 0; t < reference.size(); ++t)
        worst = std::max(worst, std::abs(est.eta[t] - reference[t]) / (1.0 + reference[t]));
      BisectResult r = bisect(mesh, mark(est, {MarkingKind::maximum, 0.5}), 1);
      u_prev = prolong(step.u, mesh, r.mesh, r.map);
      mesh = std::move(r.mesh);
    }
    ok = ok && worst <= 1e-12;
    detail += "estimator gap " + fmt(worst) + "; ";
  }

  // (c) manufactured f against the flux-divergence difference quotient.
  {
    std::uniform_real_distribution<double> r_dist(0.1, 0.85);
    std::uniform_real_distribution<double> phi_dist(0.1, 1.5 * M_PI - 0.1);
    double worst = 0.0;
    for (const char* name : {"ex1", "ex2", "ex3", "ex4"}) {
      const Problem p = catalog(name);
      const auto flux = [&p](double x, double y) {
        const Vec2 g = p.exact_grad(x, y);
        return p.alpha(dot(g, g)) * g;
      };
      for (int i = 0; i < 100; ++i) {
        const double r = r_dist(rng), phi = phi_dist(rng);
        const double x = r * std::cos(phi), y = r * std::sin(phi);
        const double h = 1e-5;
        const double div = (flux(x + h, y).x - flux(x - h, y).x) / (2 * h) +
                           (flux(x, y + h).y - flux(x, y - h).y) / (2 * h);
        worst = std::max(worst, std::abs(-div - p.f(x, y)) / (1.0 + std::abs(p.f(x, y))));
      }
    }
    ok = ok && worst <= 1e-4;
    detail += "manufactured-f gap " + fmt(worst);
  }
  record(11, "oracle equivalence: CG/dense, estimator/Laplace, manufactured f/divergence", ok,
         detail);
}

void criterion_12() {
  bool ok = true;
  std::string detail;

  // Conformity + area conservation along an adaptive ex1 run, and the shape
  // regularity audit staying within a factor 2 of the initial value over 25
  // iterations.
  {
    const Problem p = catalog("ex1");
    Mesh mesh = initial_mesh(p);
    const double area0 = mesh.total_area();
    const double shape0 = audit_shape_regularity(mesh);
    double worst_shape = shape0;
    P1Function u_prev = zero_function(mesh);
    bool conforming = true;
    for (int k = 1; k <= 25; ++k) {
      const KacanovResult step = kacanov_step(mesh, u_prev, p, 5, 1e-10);
      const LocalEstimates est = estimate(mesh, u_prev, step.u, p, 5);
      BisectResult r = bisect(mesh, mark(est, {MarkingKind::maximum, 0.7}), 1);
      u_prev = prolong(step.u, mesh, r.mesh, r.map);
      mesh = std::move(r.mesh);
      worst_shape = std::max(worst_shape, audit_shape_regularity(mesh));
      if (mesh.element_count() <= 1200) {
        const ConformityReport report = check_conformity(mesh);
        if (!report.ok) {
          conforming = false;
          detail += report.detail + "; ";
        }
      }
      if (std::abs(mesh.total_area() - area0) > 1e-12 * area0) {
        ok = false;
        detail += "area drifted at k=" + std::to_string(k) + "; ";
      }
    }
    const ConformityReport final_report = check_conformity(mesh);
    conforming = conforming && final_report.ok;
    ok = ok && conforming && worst_shape <= 2.0 * shape0;
    detail += "shape audit " + fmt(shape0) + " -> " + fmt(worst_shape) + " over 25 iters (" +
              std::to_string(mesh.element_count()) + " elements); ";
  }

  // Prolongation pointwise-exact to 1e-12 on random data and random marking.
  {
    std::mt19937_64 rng(73);
    Mesh mesh = uniform_refine(make_lshape_mesh(), 2).mesh;
    P1Function u = oracles::random_p1(mesh, rng, 1.5, false);
    double worst = 0.0;
    for (int round = 0; round < 3; ++round) {
      std::uniform_int_distribution<int> pick(0, mesh.element_count() - 1);
      std::vector<int> marked{pick(rng), pick(rng), pick(rng), pick(rng)};
      const BisectResult r = bisect(mesh, marked, 1);
      const P1Function u_fine = prolong(u, mesh, r.mesh, r.map);
      std::uniform_real_distribution<double> bary(0.02, 0.95);
      for (int t = 0; t < mesh.element_count(); ++t) {
        const auto tr = mesh.triangle(t);
        for (int s = 0; s < 100; ++s) {
          const double l0 = bary(rng);
          const double l1 = bary(rng) * (1.0 - l0);
          const double l2 = 1.0 - l0 - l1;
          const Vec2 pt = l0 * tr[0] + l1 * tr[1] + l2 * tr[2];
          const double coarse = value_on_element(mesh, u, t, l0, l1, l2);
          for (int c : r.map.children[t]) {
            const auto ctr = r.mesh.triangle(c);
            const double a2 = 2.0 * r.mesh.area(c);
            const double b0 = cross(ctr[1] - pt, ctr[2] - pt) / a2;
            const double b1 = cross(ctr[2] - pt, ctr[0] - pt) / a2;
            const double b2 = cross(ctr[0] - pt, ctr[1] - pt) / a2;
            if (b0 >= -1e-12 && b1 >= -1e-12 && b2 >= -1e-12) {
              const double fine = value_on_element(r.mesh, u_fine, c, b0, b1, b2);
              worst = std::max(worst, std::abs(fine - coarse));
              break;
            }
          }
        }
      }
      mesh = std::move(r.mesh);
      u = std::move(u_fine);
    }
    ok = ok && worst < 1e-12;
    detail += "prolongation max pointwise gap " + fmt(worst);
  }
  record(12, "mesh property suite: conformity, area, shape regularity, exact prolongation", ok,
         detail);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }
  const auto want = [only](int id) { return only == 0 || only == id; };

  if (want(1)) criterion_1();
  if (want(2)) criterion_2();
  if (want(3)) criterion_3();
  if (want(4)) criterion_4();
  if (want(5)) criterion_5();
  if (want(6)) criterion_6();
  if (want(7)) criterion_7();
  if (want(8)) criterion_8();
  if (want(9)) criterion_9();
  if (want(10)) criterion_10();
  if (want(11)) criterion_11();
  if (want(12)) criterion_12();

  int failures = 0;
  for (const Criterion& c : g_results) failures += c.passed ? 0 : 1;
  std::printf("%zu criteria run, %d failed\n", g_results.size(), failures);
  return failures == 0 ? 0 : 1;
}
