#include "folia/poly.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

namespace {
constexpr double kTrimEps = 1e-300;
}

void Poly::trim() {
  while (!c_.empty() && std::abs(c_.back()) < kTrimEps) c_.pop_back();
}

Poly Poly::from_roots(const std::vector<Complex>& roots, Complex leading) {
  std::vector<Complex> c{leading};
  for (Complex r : roots) {
    c.push_back(0.0);
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return Poly(std::move(c));
}

Complex Poly::operator()(Complex z) const {
  Complex acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Complex Poly::derivative_at(Complex z) const {
  Complex p = 0.0, dp = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return dp;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Complex> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Poly(std::move(d));
}

Poly Poly::operator*(const Poly& other) const {
  if (is_zero() || other.is_zero()) return Poly();
  std::vector<Complex> out(c_.size() + other.c_.size() - 1, Complex(0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < other.c_.size(); ++j) out[i + j] += c_[i] * other.c_[j];
  return Poly(std::move(out));
}

Poly Poly::operator*(Complex s) const {
  std::vector<Complex> out = c_;
  for (auto& v : out) v *= s;
  return Poly(std::move(out));
}

std::vector<Complex> Poly::roots() const {
  if (degree() <= 0) return {};
  std::vector<Complex> c = c_;

  // Deflate exact roots at the origin first.
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  std::vector<Complex> result;
  size_t first = 0;
  while (first + 1 < c.size() && std::abs(c[first]) < 1e-15 * scale) {
    result.push_back(0.0);
    ++first;
  }
  c.erase(c.begin(), c.begin() + first);
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return result;
  if (n == 1) {
    result.push_back(-c[0] / c[1]);
    return result;
  }

  // Aberth-Ehrlich with deterministic starting points on a circle.
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k] / c[n]));
  radius = 1.0 + radius;
  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) {
    double ang = kTwoPi * k / n + 0.39;
    z[k] = radius * Complex(std::cos(ang), std::sin(ang));
  }
  Poly p(c);
  Poly dp = p.derivative();
  for (int iter = 0; iter < 600; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex pv = p(z[i]);
      Complex dv = dp(z[i]);
      if (pv == Complex(0)) continue;
      Complex w = (dv != Complex(0)) ? pv / dv : Complex(1e-12);
      Complex s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      Complex denom = 1.0 - w * s;
      Complex delta = (std::abs(denom) > 1e-300) ? w / denom : w;
      z[i] -= delta;
      worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-15) break;
  }
  result.insert(result.end(), z.begin(), z.end());
  return result;
}

std::vector<RootCluster> cluster_roots(std::vector<Complex> roots, double tol) {
  std::vector<RootCluster> clusters;
  std::vector<bool> used(roots.size(), false);
  for (size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    Complex sum = roots[i];
    int count = 1;
    used[i] = true;
    for (size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - roots[i]) <= tol * (1.0 + std::abs(roots[i]))) {
        sum += roots[j];
        ++count;
        used[j] = true;
      }
    }
    clusters.push_back({sum / static_cast<double>(count), count});
  }
  std::sort(clusters.begin(), clusters.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return clusters;
}

}  // namespace folia
