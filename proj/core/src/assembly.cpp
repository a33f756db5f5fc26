#include "kacfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kacfem/quadrature.hpp"
#include "kacfem/sums.hpp"

namespace kacfem {

void SparseSymMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

double SparseSymMatrix::inf_norm() const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += std::abs(val[k]);
    worst = std::max(worst, acc);
  }
  return worst;
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      if (col[k] == i) d[i] = val[k];
  return d;
}

namespace {

struct Triplet {
  int row, col;
  double val;
};

SparseSymMatrix csr_from_triplets(int n, std::vector<Triplet>& triplets) {
  SparseSymMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (const Triplet& t : triplets) ++m.row_ptr[t.row + 1];
  for (int i = 0; i < n; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  std::vector<int> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
  std::vector<int> cols(triplets.size());
  std::vector<double> vals(triplets.size());
  for (const Triplet& t : triplets) {
    const int k = cursor[t.row]++;
    cols[k] = t.col;
    vals[k] = t.val;
  }
  // Stable per-row sort by column, then merge duplicates in that order, so
  // the result does not depend on insertion order.
  m.col.reserve(cols.size());
  m.val.reserve(vals.size());
  std::vector<int> order;
  std::vector<int> new_row_ptr(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const int begin = m.row_ptr[i], end = m.row_ptr[i + 1];
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return cols[a] < cols[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int idx = order[k];
      if (!m.col.empty() && static_cast<int>(m.col.size()) > new_row_ptr[i] &&
          m.col.back() == cols[idx]) {
        m.val.back() += vals[idx];
      } else {
        m.col.push_back(cols[idx]);
        m.val.push_back(vals[idx]);
      }
    }
    new_row_ptr[i + 1] = static_cast<int>(m.col.size());
  }
  m.row_ptr = std::move(new_row_ptr);
  return m;
}

std::array<Vec2, 3> basis_gradients(const std::array<Vec2, 3>& tr, double area) {
  const double a2 = 2.0 * area;
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = tr[(i + 1) % 3];
    const Vec2& pk = tr[(i + 2) % 3];
    g[i] = {(pj.y - pk.y) / a2, (pk.x - pj.x) / a2};
  }
  return g;
}

double element_weight(const Mesh& mesh, const P1Function& w, const Problem& problem, int t) {
  const Vec2 gw = gradient_on_element(mesh, w, t);
  const double a = problem.alpha(dot(gw, gw));
  if (!std::isfinite(a))
    throw std::runtime_error("assemble: alpha is not finite on element " + std::to_string(t));
  return a;
}

}  // namespace

std::array<std::array<double, 3>, 3> element_stiffness(const Mesh& mesh, int t) {
  const auto tr = mesh.triangle(t);
  const double area = mesh.area(t);
  const auto g = basis_gradients(tr, area);
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = area * dot(g[i], g[j]);
  return k;
}

std::vector<double> assemble_load_all(const Mesh& mesh, const Problem& problem, int quad_order) {
  const TriQuadRule& rule = triangle_rule(quad_order);
  std::vector<double> load(mesh.vertex_count(), 0.0);
  for (int t = 0; t < mesh.element_count(); ++t) {
    const auto tr = mesh.triangle(t);
    const auto& v = mesh.elements()[t].v;
    const double area = mesh.area(t);
    for (const TriQuadNode& q : rule.nodes) {
      const double x = q.l0 * tr[0].x + q.l1 * tr[1].x + q.l2 * tr[2].x;
      const double y = q.l0 * tr[0].y + q.l1 * tr[1].y + q.l2 * tr[2].y;
      const double fv = problem.f(x, y);
      if (!std::isfinite(fv))
        throw std::runtime_error("assemble: f is not finite on element " + std::to_string(t));
      const double s = q.w * area * fv;
      load[v[0]] += s * q.l0;
      load[v[1]] += s * q.l1;
      load[v[2]] += s * q.l2;
    }
  }
  return load;
}

LinearSystem assemble(const Mesh& mesh, const P1Function& w, const Problem& problem,
                      int quad_order) {
  LinearSystem sys;
  sys.dofs = make_dof_map(mesh);
  const int n = sys.dofs.free_count();

  // Dirichlet lift: g at boundary vertices, zero at free ones.
  sys.lift = zero_function(mesh);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.vertices()[v].on_boundary) {
      const Vertex& p = mesh.vertices()[v];
      const double gv = problem.g(p.x, p.y);
      if (!std::isfinite(gv))
        throw std::runtime_error("assemble: boundary data not finite at vertex " +
                                 std::to_string(v));
      sys.lift.coeffs[v] = gv;
    }
  }

  std::vector<double> rhs(n, 0.0);
  const std::vector<double> load = assemble_load_all(mesh, problem, quad_order);
  for (int i = 0; i < n; ++i) rhs[i] = load[sys.dofs.free[i]];

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 9);
  for (int t = 0; t < mesh.element_count(); ++t) {
    const double alpha_t = element_weight(mesh, w, problem, t);
    const auto tr = mesh.triangle(t);
    const double area = mesh.area(t);
    const auto g = basis_gradients(tr, area);
    const auto& v = mesh.elements()[t].v;
    for (int i = 0; i < 3; ++i) {
      const int gi = sys.dofs.index_of[v[i]];
      if (gi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const double kij = alpha_t * area * dot(g[i], g[j]);
        const int gj = sys.dofs.index_of[v[j]];
        if (gj >= 0)
          triplets.push_back({gi, gj, kij});
        else
          rhs[gi] -= kij * sys.lift.coeffs[v[j]];
      }
    }
  }
  sys.matrix = csr_from_triplets(n, triplets);
  sys.rhs = std::move(rhs);
  return sys;
}

double apply_form(const Mesh& mesh, const P1Function& w, const P1Function& u,
                  const P1Function& v, const Problem& problem) {
  std::vector<double> per_element(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) {
    const double alpha_t = element_weight(mesh, w, problem, t);
    const Vec2 gu = gradient_on_element(mesh, u, t);
    const Vec2 gv = gradient_on_element(mesh, v, t);
    per_element[t] = alpha_t * mesh.area(t) * dot(gu, gv);
  }
  return pairwise_sum(per_element);
}

double load_functional(const Mesh& mesh, const Problem& problem, const P1Function& v,
                       int quad_order) {
  const TriQuadRule& rule = triangle_rule(quad_order);
  std::vector<double> per_element(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) {
    const auto tr = mesh.triangle(t);
    const double area = mesh.area(t);
    double acc = 0.0;
    for (const TriQuadNode& q : rule.nodes) {
      const double x = q.l0 * tr[0].x + q.l1 * tr[1].x + q.l2 * tr[2].x;
      const double y = q.l0 * tr[0].y + q.l1 * tr[1].y + q.l2 * tr[2].y;
      acc += q.w * problem.f(x, y) * value_on_element(mesh, v, t, q.l0, q.l1, q.l2);
    }
    per_element[t] = area * acc;
  }
  return pairwise_sum(per_element);
}

double energy_potential(const Mesh& mesh, const P1Function& u, const Problem& problem) {
  if (!problem.primitive)
    throw std::runtime_error("energy: problem '" + problem.name +
                             "' has no registered primitive of alpha");
  std::vector<double> per_element(mesh.element_count());
  for (int t = 0; t < mesh.element_count(); ++t) {
    const Vec2 gu = gradient_on_element(mesh, u, t);
    per_element[t] = mesh.area(t) * problem.primitive(dot(gu, gu));
  }
  return 0.5 * pairwise_sum(per_element);
}

double energy(const Mesh& mesh, const P1Function& u, const Problem& problem, int quad_order) {
  return energy_potential(mesh, u, problem) - load_functional(mesh, problem, u, quad_order);
}

}  // namespace kacfem
