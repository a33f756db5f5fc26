#pragma once

#include <functional>
#include <optional>
#include <string>

#include "kacfem/mesh.hpp"

namespace kacfem {

enum class DomainKind { lshape, square };

/// Quasi-linear diffusion problem -div[alpha(|grad u|^2) grad u] = f with
/// u = g on the boundary. The diffusivity alpha depends on t = |grad u|^2
/// only; primitive is A(tau) = int_0^tau alpha(t) dt in closed form.
struct Problem {
  std::string name;
  DomainKind domain = DomainKind::square;
  std::function<double(double)> alpha;
  std::function<double(double)> d_alpha;
  std::function<double(double)> primitive;
  std::function<double(double, double)> f;
  std::function<double(double, double)> g;
  std::function<double(double, double)> exact;        // empty when unknown
  std::function<Vec2(double, double)> exact_grad;     // empty when unknown
  std::optional<double> c_a;  // inf alpha, when positive
  std::optional<double> C_a;  // sup alpha
  bool satisfies_ellipticity = false;  // c <= alpha(t^2) + 2 t^2 alpha'(t^2) <= C
  bool is_decreasing = false;          // alpha' <= 0

  bool has_exact() const { return static_cast<bool>(exact_grad); }
};

/// Named benchmark problems: ex1..ex4 (manufactured singular solution on the
/// L-shape with four diffusivities), curvature (prescribed mean curvature on
/// the square with ring loading), poisson (alpha = 1, f = 1 on the square).
Problem catalog(const std::string& name);

Mesh initial_mesh(const Problem& problem);

/// Exact benchmark solution in polar form u = r^{2/3} sin(2 phi / 3) with the
/// angle measured from the leg on the positive x-axis, phi in [0, 3 pi/2].
struct PolarValue {
  double u = 0.0;
  Vec2 grad{};
  bool grad_singular = false;  // set at the re-entrant corner
};
PolarValue exact_polar(double x, double y);

/// Closed-form right-hand side for the manufactured L-shape problems:
/// f = alpha'(q(r)) * (16/81) * r^{-2} * sin(2 phi/3) with q = (4/9) r^{-2/3}.
/// Throws when evaluated within 1e-14 of the corner.
double manufactured_f(const std::function<double(double)>& alpha_prime, double x, double y);

}  // namespace kacfem
