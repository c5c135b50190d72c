#pragma once
// 1-D Gauss-Legendre quadrature with adaptive panel bisection. Integrands with
// known kinks/singularities pass their locations as breakpoints; panels refine
// down to an absolute width floor, below which the unresolved (possibly
// divergent) mass is reported via converged=false and the residual estimate.
#include <functional>
#include <vector>

namespace skewflow {

inline constexpr double kPi = 3.14159265358979323846;

struct GlRule {
  std::vector<double> x;  // nodes in (-1,1)
  std::vector<double> w;
};
const GlRule& gauss_legendre(int n);

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n);

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = true;
};

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breakpoints = {},
                              double rel_tol = 1e-11, int max_panels = 4096,
                              double min_width = 1e-13);

double sphere_area(int d);  // |S^{d-1}|
double ball_volume(int d, double r);

}  // namespace skewflow
