#include "kacfem/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace kacfem {

namespace {

double lshape_angle(double x, double y) {
  double phi = std::atan2(y, x);
  if (phi < 0.0) phi += 2.0 * M_PI;  // legs at phi = 0 and phi = 3 pi/2
  return phi;
}

}  // namespace

PolarValue exact_polar(double x, double y) {
  PolarValue out;
  const double r = std::hypot(x, y);
  if (r < 1e-14) {
    out.u = 0.0;
    out.grad_singular = true;
    return out;
  }
  const double phi = lshape_angle(x, y);
  const double s = std::sin(2.0 * phi / 3.0);
  const double c = std::cos(2.0 * phi / 3.0);
  const double r13 = std::cbrt(r);
  out.u = r13 * r13 * s;
  const double ur = (2.0 / 3.0) * s / r13;       // radial derivative
  const double ut = (2.0 / 3.0) * c / r13;       // angular derivative / r
  const double cphi = x / r, sphi = y / r;
  out.grad = {ur * cphi - ut * sphi, ur * sphi + ut * cphi};
  return out;
}

double manufactured_f(const std::function<double(double)>& alpha_prime, double x, double y) {
  const double r = std::hypot(x, y);
  if (r < 1e-14)
    throw std::invalid_argument("manufactured_f: evaluation at the re-entrant corner");
  const double phi = lshape_angle(x, y);
  const double r13 = std::cbrt(r);
  const double q = (4.0 / 9.0) / (r13 * r13);  // |grad u|^2
  return alpha_prime(q) * (16.0 / 81.0) / (r * r) * std::sin(2.0 * phi / 3.0);
}

namespace {

Problem manufactured_problem(std::string name) {
  Problem p;
  p.name = std::move(name);
  p.domain = DomainKind::lshape;
  p.exact = [](double x, double y) { return exact_polar(x, y).u; };
  p.exact_grad = [](double x, double y) {
    const PolarValue v = exact_polar(x, y);
    if (v.grad_singular)
      throw std::domain_error("exact gradient is singular at the re-entrant corner");
    return v.grad;
  };
  p.g = p.exact;
  return p;
}

Problem make_ex1() {
  Problem p = manufactured_problem("ex1");
  p.alpha = [](double t) { return 1.0 / (1.0 + t) + 0.5; };
  p.d_alpha = [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
  p.primitive = [](double tau) { return std::log1p(tau) + 0.5 * tau; };
  p.f = [a = p.d_alpha](double x, double y) { return manufactured_f(a, x, y); };
  p.c_a = 0.5;
  p.C_a = 1.5;
  p.satisfies_ellipticity = true;
  p.is_decreasing = true;
  return p;
}

Problem make_ex2() {
  Problem p = manufactured_problem("ex2");
  p.alpha = [](double t) { return 1.0 / (1.0 + t) + 0.1; };
  p.d_alpha = [](double t) { return -1.0 / ((1.0 + t) * (1.0 + t)); };
  p.primitive = [](double tau) { return std::log1p(tau) + 0.1 * tau; };
  p.f = [a = p.d_alpha](double x, double y) { return manufactured_f(a, x, y); };
  p.c_a = 0.1;
  p.C_a = 1.1;
  p.satisfies_ellipticity = false;  // alpha(t^2) + 2 t^2 alpha'(t^2) changes sign
  p.is_decreasing = true;
  return p;
}

Problem make_ex3() {
  Problem p = manufactured_problem("ex3");
  p.alpha = [](double t) { return 1.0 - 0.5 * std::exp(-1.5 * t); };
  p.d_alpha = [](double t) { return 0.75 * std::exp(-1.5 * t); };
  p.primitive = [](double tau) { return std::exp(-1.5 * tau) / 3.0 + tau - 1.0 / 3.0; };
  p.f = [a = p.d_alpha](double x, double y) { return manufactured_f(a, x, y); };
  p.c_a = 0.5;
  p.C_a = 1.0;
  p.satisfies_ellipticity = true;
  p.is_decreasing = false;  // monotone increasing
  return p;
}

Problem make_ex4() {
  Problem p = manufactured_problem("ex4");
  p.alpha = [](double t) {
    const double s = std::sqrt(t);
    return 2.0 - s / (1.0 + s);
  };
  p.d_alpha = [](double t) {
    // alpha(t) = 1 + 1/(1 + sqrt t); derivative is -infinity at t = 0+.
    const double s = std::sqrt(t);
    return -1.0 / (2.0 * s * (1.0 + s) * (1.0 + s));
  };
  p.primitive = [](double tau) {
    const double s = std::sqrt(tau);
    return tau + 2.0 * s - 2.0 * std::log1p(s);
  };
  p.f = [a = p.d_alpha](double x, double y) { return manufactured_f(a, x, y); };
  p.c_a = 1.0;
  p.C_a = 2.0;
  p.satisfies_ellipticity = true;
  p.is_decreasing = true;
  return p;
}

Problem make_curvature() {
  Problem p;
  p.name = "curvature";
  p.domain = DomainKind::square;
  p.alpha = [](double t) { return 1.0 / std::sqrt(1.0 + t); };
  p.d_alpha = [](double t) { return -0.5 / std::pow(1.0 + t, 1.5); };
  p.primitive = [](double tau) { return 2.0 * (std::sqrt(1.0 + tau) - 1.0); };
  p.f = [](double x, double y) {
    const double r = std::hypot(x, y);
    if (r <= 1.0 / 3.0) return 5.0;
    if (r <= 2.0 / 3.0) return -3.0;
    return 0.0;
  };
  p.g = [](double, double) { return 0.0; };
  p.c_a = std::nullopt;  // inf alpha = 0
  p.C_a = 1.0;
  p.satisfies_ellipticity = false;  // alpha and alpha' both vanish at infinity
  p.is_decreasing = true;
  return p;
}

Problem make_poisson() {
  Problem p;
  p.name = "poisson";
  p.domain = DomainKind::square;
  p.alpha = [](double) { return 1.0; };
  p.d_alpha = [](double) { return 0.0; };
  p.primitive = [](double tau) { return tau; };
  p.f = [](double, double) { return 1.0; };
  p.g = [](double, double) { return 0.0; };
  p.c_a = 1.0;
  p.C_a = 1.0;
  p.satisfies_ellipticity = true;
  p.is_decreasing = true;  // constant alpha is weakly decreasing
  return p;
}

}  // namespace

Problem catalog(const std::string& name) {
  if (name == "ex1") return make_ex1();
  if (name == "ex2") return make_ex2();
  if (name == "ex3") return make_ex3();
  if (name == "ex4") return make_ex4();
  if (name == "curvature") return make_curvature();
  if (name == "poisson") return make_poisson();
  throw std::invalid_argument("catalog: unknown problem '" + name +
                              "' (known: ex1 ex2 ex3 ex4 curvature poisson)");
}

Mesh initial_mesh(const Problem& problem) {
  return problem.domain == DomainKind::lshape ? make_lshape_mesh() : make_square_mesh();
}

}  // namespace kacfem
