#include "folia/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace folia {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on the Legendre polynomial, cosine initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

template <typename T>
T gauss_apply(const std::function<T(double)>& f, double a, double b, const GaussRule& r) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  T acc{};
  for (size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(mid + half * r.nodes[i]);
  return acc * half;
}

template <typename T>
T adaptive_impl(const std::function<T(double)>& f, double a, double b, double tol,
                int depth, const GaussRule& coarse, const GaussRule& fine) {
  T whole = gauss_apply(f, a, b, coarse);
  T refined = gauss_apply(f, a, 0.5 * (a + b), fine) + gauss_apply(f, 0.5 * (a + b), b, fine);
  if (depth <= 0 || std::abs(refined - whole) <= tol) return refined;
  return adaptive_impl(f, a, 0.5 * (a + b), 0.5 * tol, depth - 1, coarse, fine) +
         adaptive_impl(f, 0.5 * (a + b), b, 0.5 * tol, depth - 1, coarse, fine);
}

}  // namespace

const GaussRule& gauss_rule(int npoints) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(npoints);
  if (it == cache.end()) it = cache.emplace(npoints, compute_rule(npoints)).first;
  return it->second;
}

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
  return adaptive_impl<double>(f, a, b, tol, max_depth, gauss_rule(15), gauss_rule(15));
}

Complex adaptive_integrate_complex(const std::function<Complex(double)>& f, double a,
                                   double b, double tol, int max_depth) {
  return adaptive_impl<Complex>(f, a, b, tol, max_depth, gauss_rule(15), gauss_rule(15));
}

double brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                  double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw domain_error("brent_root: interval does not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
  }
  return b;
}

std::vector<double> find_sign_changes(const std::function<double(double)>& f, double a,
                                      double b, int samples, double tol) {
  std::vector<double> roots;
  double prev_t = a, prev_f = f(a);
  for (int i = 1; i <= samples; ++i) {
    double t = a + (b - a) * i / samples;
    double ft = f(t);
    if (prev_f == 0.0) {
      roots.push_back(prev_t);
    } else if (prev_f * ft < 0.0) {
      roots.push_back(brent_root(f, prev_t, t, prev_f, ft, tol));
    }
    prev_t = t;
    prev_f = ft;
  }
  if (prev_f == 0.0) roots.push_back(prev_t);
  return roots;
}

}  // namespace folia
