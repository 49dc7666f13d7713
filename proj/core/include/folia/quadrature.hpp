#pragma once

#include <functional>
#include <vector>

#include "folia/types.hpp"

namespace folia {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order, computed once and cached.
const GaussRule& gauss_rule(int npoints);

/// Adaptive Gauss-Legendre integration of a real integrand on [a, b].
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth = 48);

/// Complex-valued variant (integrates real and imaginary parts together).
Complex adaptive_integrate_complex(const std::function<Complex(double)>& f, double a,
                                   double b, double tol, int max_depth = 48);

/// Brent's method on a bracketing interval [a, b] with f(a) f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double tol);

/// Locates all sign changes of f on [a, b] from a uniform presample of
/// `samples` points, refining each bracket with Brent's method.
std::vector<double> find_sign_changes(const std::function<double(double)>& f, double a,
                                      double b, int samples, double tol);

}  // namespace folia
