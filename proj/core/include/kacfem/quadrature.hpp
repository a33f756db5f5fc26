#pragma once

#include <vector>

namespace kacfem {

/// Quadrature node on the reference triangle in barycentric coordinates.
/// Weights sum to 1; multiply by |T| to integrate over a physical element.
struct TriQuadNode {
  double l0, l1, l2;
  double w;
};

struct TriQuadRule {
  int degree;  // polynomial degree integrated exactly
  std::vector<TriQuadNode> nodes;
};

/// Rule with all nodes strictly inside the element (integrands may be singular
/// at mesh vertices). order <= 1 gives the centroid rule, order 2 the 3-point
/// degree-2 rule, anything higher the 7-point degree-5 rule.
const TriQuadRule& triangle_rule(int order);

/// Gauss-Legendre nodes/weights on [0, 1]. n up to 64.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre_01(int n);

}  // namespace kacfem
