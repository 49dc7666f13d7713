#pragma once

#include <vector>

#include "folia/types.hpp"

namespace folia {

/// Dense complex polynomial, coefficients stored in ascending powers of z.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Complex> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly from_roots(const std::vector<Complex>& roots, Complex leading = 1.0);

  /// Degree of the polynomial; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Complex>& coeffs() const { return c_; }
  Complex coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Complex(0);
  }
  Complex leading() const { return c_.empty() ? Complex(0) : c_.back(); }

  Complex operator()(Complex z) const;
  Complex derivative_at(Complex z) const;
  Poly derivative() const;
  Poly operator*(const Poly& other) const;
  Poly operator*(Complex s) const;

  /// All complex roots with multiplicity (Aberth-Ehrlich iteration).
  std::vector<Complex> roots() const;

 private:
  void trim();
  std::vector<Complex> c_;
};

struct RootCluster {
  Complex location;
  int order;
};

/// Groups nearly coincident roots into multiple roots.
std::vector<RootCluster> cluster_roots(std::vector<Complex> roots, double tol);

}  // namespace folia
