#include "kacfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace kacfem {

namespace {

TriQuadRule make_centroid_rule() {
  return {1, {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0}}};
}

TriQuadRule make_degree2_rule() {
  // Interior 3-point rule (Strang): permutations of (2/3, 1/6, 1/6).
  const double a = 2.0 / 3.0, b = 1.0 / 6.0, w = 1.0 / 3.0;
  return {2,
          {
              {a, b, b, w},
              {b, a, b, w},
              {b, b, a, w},
          }};
}

TriQuadRule make_degree5_rule() {
  const double s15 = std::sqrt(15.0);
  const double b1 = (6.0 + s15) / 21.0;
  const double a1 = 1.0 - 2.0 * b1;
  const double w1 = (155.0 + s15) / 1200.0;
  const double b2 = (6.0 - s15) / 21.0;
  const double a2 = 1.0 - 2.0 * b2;
  const double w2 = (155.0 - s15) / 1200.0;
  return {5,
          {
              {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
              {a1, b1, b1, w1},
              {b1, a1, b1, w1},
              {b1, b1, a1, w1},
              {a2, b2, b2, w2},
              {b2, a2, b2, w2},
              {b2, b2, a2, w2},
          }};
}

}  // namespace

const TriQuadRule& triangle_rule(int order) {
  static const TriQuadRule centroid = make_centroid_rule();
  static const TriQuadRule degree2 = make_degree2_rule();
  static const TriQuadRule degree5 = make_degree5_rule();
  if (order <= 1) return centroid;
  if (order == 2) return degree2;
  return degree5;
}

GaussRule gauss_legendre_01(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre_01: n out of range");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n over [-1, 1], then map to [0, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace kacfem
