#include "kacfem/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kacfem/driver.hpp"
#include "kacfem/quadrature.hpp"

namespace kacfem {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

Problem homogenized(Problem p) {
  p.name += "-g0";
  p.g = [](double, double) { return 0.0; };
  p.exact = nullptr;
  p.exact_grad = nullptr;
  return p;
}

P1Function random_function(const Mesh& mesh, std::mt19937_64& rng, double amplitude,
                           bool zero_boundary) {
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  P1Function fn = zero_function(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (zero_boundary && mesh.vertices()[v].on_boundary) continue;
    fn.coeffs[v] = dist(rng);
  }
  return fn;
}

Mesh refined_domain_mesh(const Problem& problem, int min_elements) {
  Mesh mesh = initial_mesh(problem);
  while (mesh.element_count() < min_elements) mesh = uniform_refine(mesh, 1).mesh;
  return mesh;
}

// --- conformity ------------------------------------------------------------

AuditResult check_conformity_suite(const AuditOptions& opt) {
  AuditResult result{"conformity", AuditStatus::pass, ""};
  std::mt19937_64 rng(opt.seed);

  for (const char* domain : {"lshape", "square"}) {
    Mesh mesh = std::string(domain) == "lshape" ? make_lshape_mesh() : make_square_mesh();
    const double area0 = mesh.total_area();
    const double shape0 = audit_shape_regularity(mesh);

    for (int round = 0; round < 7; ++round) {
      std::vector<int> marked;
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (int t = 0; t < mesh.element_count(); ++t)
        if (coin(rng) < 0.35) marked.push_back(t);
      if (marked.empty()) marked.push_back(0);
      BisectResult r = bisect(mesh, marked, 1 + round % 2);

      const ConformityReport conf = check_conformity(r.mesh);
      if (!conf.ok) {
        result.status = AuditStatus::fail;
        result.detail = std::string(domain) + " round " + std::to_string(round) + ": " +
                        conf.detail;
        return result;
      }
      if (std::abs(r.mesh.total_area() - area0) > 1e-12 * area0) {
        result.status = AuditStatus::fail;
        result.detail = std::string(domain) + ": area not conserved";
        return result;
      }
      if (audit_shape_regularity(r.mesh) > 2.0 * shape0) {
        result.status = AuditStatus::fail;
        result.detail = std::string(domain) + ": shape regularity degraded beyond 2x";
        return result;
      }
      // Nestedness + monotone local mesh size: every child inside its parent.
      for (int t = 0; t < mesh.element_count(); ++t) {
        const auto parent = mesh.triangle(t);
        const double h_parent = mesh_size(mesh, t);
        const double a2 = 2.0 * mesh.area(t);
        for (int c : r.map.children[t]) {
          if (r.map.children[t].size() > 1 && !(mesh_size(r.mesh, c) < h_parent)) {
            result.status = AuditStatus::fail;
            result.detail = "child mesh size did not decrease";
            return result;
          }
          for (const Vec2 p : r.mesh.triangle(c)) {
            const double b0 = cross(parent[1] - parent[0], p - parent[0]);
            const double b1 = cross(parent[2] - parent[1], p - parent[1]);
            const double b2 = cross(parent[0] - parent[2], p - parent[2]);
            if (b0 < -1e-12 * a2 || b1 < -1e-12 * a2 || b2 < -1e-12 * a2) {
              result.status = AuditStatus::fail;
              result.detail = "child element escapes its parent";
              return result;
            }
          }
        }
      }
      mesh = std::move(r.mesh);
      if (mesh.element_count() > 1500) break;
    }
  }
  result.detail = "refinement keeps meshes conforming, nested and area-conserving";
  return result;
}

// --- ellipticity -----------------------------------------------------------

AuditResult check_ellipticity(const AuditOptions&) {
  AuditResult result{"ellipticity", AuditStatus::pass, ""};
  std::ostringstream detail;
  for (const char* name : {"ex1", "ex2", "ex3", "ex4", "curvature", "poisson"}) {
    const Problem p = catalog(name);
    // Scan alpha(t^2) + 2 t^2 alpha'(t^2) over a wide logarithmic grid.
    double lo = 1e300, hi = -1e300;
    bool sign_change = false;
    for (int i = 0; i <= 4000; ++i) {
      const double t = std::pow(10.0, -3.0 + 9.0 * i / 4000.0);  // up to 1e6
      const double s = t * t;
      const double value = p.alpha(s) + 2.0 * s * p.d_alpha(s);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      if (t <= 10.0 && value < 0.0) sign_change = true;
    }
    const bool sandwich_holds = lo > 1e-9 && hi < 1e9;
    if (sandwich_holds != p.satisfies_ellipticity) {
      result.status = AuditStatus::fail;
      result.detail = std::string(name) + ": sandwich scan (min " + fmt(lo) + ", max " +
                      fmt(hi) + ") contradicts declared flag";
      return result;
    }
    if (std::string(name) == "ex2" && !sign_change) {
      result.status = AuditStatus::fail;
      result.detail = "ex2: expected a sign change of alpha(t^2)+2t^2 alpha'(t^2) on t in [0,10]";
      return result;
    }
    if (std::string(name) == "ex3") {
      for (double t = 0.01; t < 30.0; t *= 1.7)
        if (!(p.d_alpha(t) > 0.0)) {
          result.status = AuditStatus::fail;
          result.detail = "ex3: alpha' should be positive";
          return result;
        }
    }
    if (std::string(name) == "curvature" && !(p.alpha(1e8) < 1e-3)) {
      result.status = AuditStatus::fail;
      result.detail = "curvature: alpha(1e8) not below 1e-3";
      return result;
    }
    if (!p.satisfies_ellipticity) detail << name << " violates the sandwich (by design); ";
  }
  detail << "all flags match the scans";
  result.detail = detail.str();
  return result;
}

// --- lemma-key-property ------------------------------------------------------

AuditResult check_key_property(const AuditOptions& opt) {
  AuditResult result{"lemma-key-property", AuditStatus::pass, ""};
  std::ostringstream detail;
  std::mt19937_64 rng(opt.seed + 1);
  for (const char* name : {"ex1", "ex2", "ex3", "ex4", "curvature", "poisson"}) {
    const Problem p = catalog(name);
    if (!p.is_decreasing) {
      detail << name << ": SKIP (alpha increasing, inequality not claimed); ";
      continue;
    }
    const Mesh mesh = refined_domain_mesh(p, 190);
    double worst = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
      const P1Function v = random_function(mesh, rng, 2.0, false);
      const P1Function w = random_function(mesh, rng, 2.0, false);
      const double lhs = energy_potential(mesh, v, p) - energy_potential(mesh, w, p);
      const double avv = apply_form(mesh, w, v, v, p);
      const double aww = apply_form(mesh, w, w, w, p);
      const double rhs = 0.5 * (avv - aww);
      const double slack = 1e-10 * (1.0 + std::abs(avv) + std::abs(aww));
      worst = std::max(worst, lhs - rhs);
      if (lhs > rhs + slack) {
        result.status = AuditStatus::fail;
        result.detail = std::string(name) + ": J(v)-J(w) exceeds (a(w;v,v)-a(w;w,w))/2 by " +
                        fmt(lhs - rhs);
        return result;
      }
    }
    detail << name << ": ok (worst slack " << fmt(worst) << "); ";
  }
  result.detail = detail.str();
  return result;
}

// --- galerkin-orthogonality ---------------------------------------------------

AuditResult check_galerkin(const AuditOptions& opt) {
  AuditResult result{"galerkin-orthogonality", AuditStatus::pass, ""};
  std::mt19937_64 rng(opt.seed + 2);
  double worst_ratio = 0.0;
  for (const char* name : {"poisson", "ex1", "curvature"}) {
    const Problem p = catalog(name);
    Mesh mesh = refined_domain_mesh(p, 48);
    P1Function u_prev = zero_function(mesh);
    for (int k = 0; k < 3; ++k) {
      const KacanovResult step = kacanov_step(mesh, u_prev, p, 5, 1e-12);
      if (!step.report.converged) {
        result.status = AuditStatus::fail;
        result.detail = std::string(name) + ": linear solver did not converge";
        return result;
      }
      const LinearSystem sys = assemble(mesh, u_prev, p, 5);
      std::vector<double> ufree(sys.dofs.free_count());
      for (int i = 0; i < sys.dofs.free_count(); ++i)
        ufree[i] = step.u.coeffs[sys.dofs.free[i]];
      double unorm = 0.0, rhsnorm = 0.0;
      for (double x : ufree) unorm += x * x;
      for (double x : sys.rhs) rhsnorm += x * x;
      const double scale =
          sys.matrix.inf_norm() * std::sqrt(unorm) + std::sqrt(rhsnorm) + 1e-30;
      for (int trial = 0; trial < 20; ++trial) {
        const P1Function v = random_function(mesh, rng, 1.0, true);
        const double pairing =
            apply_form(mesh, u_prev, step.u, v, p) - load_functional(mesh, p, v, 5);
        worst_ratio = std::max(worst_ratio, std::abs(pairing) / scale);
        if (std::abs(pairing) > 1e-8 * scale) {
          result.status = AuditStatus::fail;
          result.detail = std::string(name) + ": residual pairing " + fmt(pairing) +
                          " exceeds 1e-8 * " + fmt(scale);
          return result;
        }
      }
      const LocalEstimates est = estimate(mesh, u_prev, step.u, p, 5);
      const std::vector<int> marked = mark(est, MarkingRule{MarkingKind::maximum, 0.5});
      BisectResult r = bisect(mesh, marked, 1);
      u_prev = prolong(step.u, mesh, r.mesh, r.map);
      mesh = std::move(r.mesh);
    }
  }
  result.detail = "worst |<R,v>| / scale = " + fmt(worst_ratio);
  return result;
}

// --- energy-monotonicity ------------------------------------------------------

AuditResult check_energy_monotonicity(const AuditOptions&) {
  AuditResult result{"energy-monotonicity", AuditStatus::pass, ""};
  std::ostringstream detail;
  for (const char* name : {"ex1", "curvature", "poisson"}) {
    Problem p = catalog(name);
    if (p.domain == DomainKind::lshape) p = homogenized(p);
    // The ring load of the curvature problem is discontinuous, so load
    // quadratures on different meshes are not comparable at 1e-10; the
    // decrease is asserted with both iterates in the same (finer) space,
    // which is the inequality the solver actually guarantees. For smooth
    // loads the recorded per-mesh energies must decrease as well.
    const bool cross_mesh = std::string(name) != "curvature";

    Mesh mesh = initial_mesh(p);
    P1Function u_prev = zero_function(mesh);
    double prev_energy = 0.0;
    int iterations = 0;
    for (int k = 1; k <= 25; ++k, ++iterations) {
      const KacanovResult step = kacanov_step(mesh, u_prev, p, 5, 1e-10);
      if (!step.report.converged) {
        result.status = AuditStatus::fail;
        result.detail = p.name + ": solver failed at k=" + std::to_string(k);
        return result;
      }
      const double e_prolonged = energy(mesh, u_prev, p, 5);  // F_k(prolong u_{k-1})
      const double e_next = energy(mesh, step.u, p, 5);       // F_k(u_k)
      if (e_next > e_prolonged + 1e-10 * (1.0 + std::abs(e_prolonged))) {
        result.status = AuditStatus::fail;
        result.detail = p.name + ": same-space energy rose from " + fmt(e_prolonged) + " to " +
                        fmt(e_next) + " at k=" + std::to_string(k);
        return result;
      }
      if (cross_mesh && k > 1 && e_next > prev_energy + 1e-10 * (1.0 + std::abs(prev_energy))) {
        result.status = AuditStatus::fail;
        result.detail = p.name + ": recorded energy rose from " + fmt(prev_energy) + " to " +
                        fmt(e_next) + " at k=" + std::to_string(k);
        return result;
      }
      prev_energy = e_next;
      const LocalEstimates est = estimate(mesh, u_prev, step.u, p, 5);
      if (make_dof_map(mesh).free_count() > 30000) break;
      BisectResult r = bisect(mesh, mark(est, MarkingRule{MarkingKind::maximum, 0.7}), 1);
      u_prev = prolong(step.u, mesh, r.mesh, r.map);
      mesh = std::move(r.mesh);
    }
    detail << p.name << ": non-increasing over " << iterations << " iterations; ";
  }
  result.detail = detail.str();
  return result;
}

// --- problem-consistency ------------------------------------------------------

AuditResult check_problem_consistency(const AuditOptions& opt) {
  AuditResult result{"problem-consistency", AuditStatus::pass, ""};
  std::mt19937_64 rng(opt.seed + 3);
  std::uniform_real_distribution<double> tau_dist(0.01, 50.0);

  for (const char* name : {"ex1", "ex2", "ex3", "ex4", "curvature", "poisson"}) {
    const Problem p = catalog(name);

    // primitive' = alpha by central differences.
    for (int i = 0; i < 100; ++i) {
      const double tau = tau_dist(rng);
      const double h = 1e-6 * (1.0 + tau);
      const double fd = (p.primitive(tau + h) - p.primitive(tau - h)) / (2.0 * h);
      if (std::abs(fd - p.alpha(tau)) > 1e-6 * (1.0 + std::abs(p.alpha(tau)))) {
        result.status = AuditStatus::fail;
        result.detail = std::string(name) + ": primitive' != alpha at tau=" + fmt(tau);
        return result;
      }
    }
    // d_alpha = alpha' by central differences (away from alpha' singularities).
    for (int i = 0; i < 100; ++i) {
      const double t = tau_dist(rng);
      const double h = 1e-6 * (1.0 + t);
      const double fd = (p.alpha(t + h) - p.alpha(t - h)) / (2.0 * h);
      if (std::abs(fd - p.d_alpha(t)) > 1e-6 * (1.0 + std::abs(p.d_alpha(t)))) {
        result.status = AuditStatus::fail;
        result.detail = std::string(name) + ": d_alpha mismatch at t=" + fmt(t);
        return result;
      }
    }
    // primitive against Gauss-Legendre quadrature of alpha. ex4's integrand
    // has a sqrt kink at 0, so integrate in the substituted variable t = s^2.
    {
      const GaussRule gauss = gauss_legendre_01(40);
      for (const double tau : {0.37, 1.0, 4.0 / 9.0, 7.5}) {
        double quad = 0.0;
        if (std::string(name) == "ex4") {
          const double send = std::sqrt(tau);
          for (int i = 0; i < 40; ++i) {
            const double s = send * gauss.nodes[i];
            quad += send * gauss.weights[i] * p.alpha(s * s) * 2.0 * s;
          }
        } else {
          for (int i = 0; i < 40; ++i)
            quad += tau * gauss.weights[i] * p.alpha(tau * gauss.nodes[i]);
        }
        if (std::abs(quad - p.primitive(tau)) > 1e-12 * (1.0 + std::abs(quad))) {
          result.status = AuditStatus::fail;
          result.detail = std::string(name) + ": primitive vs quadrature mismatch at tau=" +
                          fmt(tau) + " (" + fmt(p.primitive(tau)) + " vs " + fmt(quad) + ")";
          return result;
        }
      }
    }
    // Manufactured solutions: f agrees with -div[alpha(|grad u|^2) grad u]
    // by second-order differences of the flux, and |grad u|^2 = (4/9) r^{-2/3}.
    if (p.has_exact()) {
      std::uniform_real_distribution<double> r_dist(0.1, 0.85);
      std::uniform_real_distribution<double> phi_dist(0.1, 1.5 * M_PI - 0.1);
      const auto flux = [&](double x, double y) {
        const Vec2 g = p.exact_grad(x, y);
        return p.alpha(dot(g, g)) * g;
      };
      for (int i = 0; i < 100; ++i) {
        const double r = r_dist(rng);
        const double phi = phi_dist(rng);
        const double x = r * std::cos(phi);
        const double y = r * std::sin(phi);
        const double h = 1e-5;
        const double div_fd = (flux(x + h, y).x - flux(x - h, y).x) / (2.0 * h) +
                              (flux(x, y + h).y - flux(x, y - h).y) / (2.0 * h);
        const double f_closed = p.f(x, y);
        if (std::abs(-div_fd - f_closed) > 1e-4 * (1.0 + std::abs(f_closed))) {
          result.status = AuditStatus::fail;
          result.detail = std::string(name) + ": manufactured f mismatch at r=" + fmt(r) +
                          " phi=" + fmt(phi) + " (closed " + fmt(f_closed) + ", fd " +
                          fmt(-div_fd) + ")";
          return result;
        }
        const PolarValue pv = exact_polar(x, y);
        const double q = dot(pv.grad, pv.grad);
        const double q_ref = (4.0 / 9.0) * std::pow(r, -2.0 / 3.0);
        if (std::abs(q - q_ref) > 1e-10 * q_ref) {
          result.status = AuditStatus::fail;
          result.detail = std::string(name) + ": |grad u|^2 identity violated";
          return result;
        }
      }
    }
  }
  result.detail = "primitives, derivatives and manufactured data match their oracles";
  return result;
}

// --- boundedness ----------------------------------------------------------------

AuditResult check_boundedness(const AuditOptions&) {
  AuditResult result{"boundedness", AuditStatus::pass, ""};
  std::ostringstream detail;
  for (const char* name : {"poisson", "ex1"}) {
    Problem p = catalog(name);
    if (p.domain == DomainKind::lshape) p = homogenized(p);
    if (!p.c_a) continue;

    RunConfig config;
    config.marking = {MarkingKind::maximum, 0.7};
    config.max_iterations = 20;
    config.max_dofs = 20000;

    // ||f||_{L^2} on a fixed fine mesh; C_P = 2/pi since both domains fit in
    // the strip -1 < y < 1.
    const Mesh fine = refined_domain_mesh(p, 3000);
    const TriQuadRule& rule = triangle_rule(5);
    double f_sq = 0.0;
    for (int t = 0; t < fine.element_count(); ++t) {
      const auto tr = fine.triangle(t);
      double acc = 0.0;
      for (const TriQuadNode& q : rule.nodes) {
        const double x = q.l0 * tr[0].x + q.l1 * tr[1].x + q.l2 * tr[2].x;
        const double y = q.l0 * tr[0].y + q.l1 * tr[1].y + q.l2 * tr[2].y;
        const double fv = p.f(x, y);
        acc += q.w * fv * fv;
      }
      f_sq += fine.area(t) * acc;
    }
    const double bound = (2.0 / M_PI) * std::sqrt(f_sq) / *p.c_a;

    // Two runs: the hard Poincare bound must hold on every iterate starting
    // from the minimal mesh; the no-growth-trend band (max over all k within
    // 1% of the max over the first 5 iterations) is measured on a run whose
    // initial mesh already resolves the solution, since discrete norms
    // saturate toward the limit from below and the band is only meaningful
    // once saturation is reached.
    for (const bool trend_run : {false, true}) {
      Mesh mesh = initial_mesh(p);
      if (trend_run) {
        const int target = p.domain == DomainKind::lshape ? 8000 : 2000;
        while (make_dof_map(mesh).free_count() < target) mesh = uniform_refine(mesh, 1).mesh;
      }
      P1Function u_prev = zero_function(mesh);
      std::vector<double> norms;
      const int iterations = trend_run ? 15 : config.max_iterations;
      for (int k = 1; k <= iterations; ++k) {
        const KacanovResult step = kacanov_step(mesh, u_prev, p, 5, 1e-10);
        const double nrm = h1_seminorm(mesh, step.u);
        norms.push_back(nrm);
        if (nrm > bound) {
          result.status = AuditStatus::fail;
          result.detail = p.name + ": ||grad u_k|| = " + fmt(nrm) + " exceeds Poincare bound " +
                          fmt(bound);
          return result;
        }
        const LocalEstimates est = estimate(mesh, u_prev, step.u, p, 5);
        BisectResult r = bisect(mesh, mark(est, config.marking), 1);
        u_prev = prolong(step.u, mesh, r.mesh, r.map);
        mesh = std::move(r.mesh);
      }
      if (trend_run) {
        const double max_all = *std::max_element(norms.begin(), norms.end());
        const double max_first5 = *std::max_element(norms.begin(), norms.begin() + 5);
        if (max_all > 1.01 * max_first5) {
          result.status = AuditStatus::fail;
          result.detail = p.name + ": ||grad u_k|| grew " + fmt(max_all / max_first5) +
                          "x beyond its value in the first 5 iterations";
          return result;
        }
        detail << p.name << ": max ||grad u_k|| = " << fmt(max_all) << " <= bound " << fmt(bound)
               << ", trend band ok; ";
      }
    }
  }
  result.detail = detail.str();
  return result;
}

}  // namespace

const std::vector<std::string>& audit_check_names() {
  static const std::vector<std::string> names = {
      "conformity",           "ellipticity",         "lemma-key-property",
      "galerkin-orthogonality", "energy-monotonicity", "problem-consistency",
      "boundedness",
  };
  return names;
}

std::vector<AuditResult> run_audit(const AuditOptions& options) {
  std::vector<AuditResult> results;
  const auto want = [&](const char* name) {
    return options.only.empty() || options.only == name;
  };
  if (want("conformity")) results.push_back(check_conformity_suite(options));
  if (want("ellipticity")) results.push_back(check_ellipticity(options));
  if (want("lemma-key-property")) results.push_back(check_key_property(options));
  if (want("galerkin-orthogonality")) results.push_back(check_galerkin(options));
  if (want("energy-monotonicity")) results.push_back(check_energy_monotonicity(options));
  if (want("problem-consistency")) results.push_back(check_problem_consistency(options));
  if (want("boundedness")) results.push_back(check_boundedness(options));
  if (results.empty())
    throw std::invalid_argument("audit: unknown check '" + options.only + "'");
  return results;
}

}  // namespace kacfem
