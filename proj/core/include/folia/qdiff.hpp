#pragma once

#include <optional>
#include <vector>

#include "folia/poly.hpp"
#include "folia/types.hpp"

namespace folia {

struct Zero {
  Complex location;
  int order;
};

struct Pole {
  std::optional<Complex> location;  // nullopt means the point at infinity
  int order;
};

/// One term of a stored sqrt(q) expansion.  The exponent is
/// twice_exponent / 2, so odd pole orders (half-integer powers) stay exact.
struct SqrtTerm {
  int twice_exponent;
  Complex coeff;
};

/// A meromorphic quadratic differential q(z) dz^2, either as a rational
/// expression on the sphere or as a Laurent model of sqrt(q) near one pole.
class QuadraticDifferential {
 public:
  static QuadraticDifferential rational(Poly numerator, Poly denominator = Poly({Complex(1)}));
  static QuadraticDifferential laurent(int pole_order, std::vector<SqrtTerm> sqrt_terms);

  bool is_rational() const { return !laurent_; }
  bool is_laurent() const { return laurent_; }

  const std::vector<Zero>& zeros() const { return zeros_; }
  const std::vector<Pole>& poles() const { return poles_; }
  int pole_index_at_infinity() const;

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  int laurent_order() const { return laurent_order_; }
  const std::vector<SqrtTerm>& sqrt_terms() const { return terms_; }

  /// q at a point of the working chart (z-plane for rational forms, the
  /// pole-centered chart for Laurent models).
  Complex eval(Complex z) const;

  /// q in the canonical chart u centered at poles()[pole_index]; u = z - p
  /// for a finite pole and u = 1/z at infinity (so q_u = q(1/u)/u^4).
  Complex eval_local(int pole_index, Complex u) const;

  /// Laurent models only: the stored branch of sqrt(q) (principal logs).
  Complex sqrt_eval(Complex z) const;

  /// Zeros mapped into the canonical chart of the given pole.
  std::vector<Complex> zeros_local(int pole_index) const;

  /// max(1, largest |zero|) in the working chart; sets tracing scales.
  double zero_scale() const;

 private:
  QuadraticDifferential() = default;
  bool laurent_ = false;
  Poly num_, den_;
  int laurent_order_ = 0;
  std::vector<SqrtTerm> terms_;
  std::vector<Zero> zeros_;
  std::vector<Pole> poles_;
};

/// Polynomial part P of sqrt(q) at a pole: sqrt(q) = u^{-n/2} (P(u) + remainder)
/// with deg P = (n-2)/2 for even n and (n-3)/2 for odd n.  Defined up to a
/// global sign.
struct PrincipalPart {
  int pole_order = 0;
  std::vector<Complex> coefficients;  // ascending powers, constant term nonzero

  int expected_degree() const {
    return pole_order % 2 == 0 ? (pole_order - 2) / 2 : (pole_order - 3) / 2;
  }
  /// z^{-1} coefficient of sqrt(q): the top coefficient for even order,
  /// exactly zero for odd order.
  Complex residue() const;
  void validate() const;
  /// Canonical representative of the {P, -P} class used for serialization:
  /// first nonzero coefficient gets Re > 0 (or Re == 0, Im > 0).
  PrincipalPart canonical_sign() const;
  static bool equivalent(const PrincipalPart& a, const PrincipalPart& b, double tol);
};

struct Residue {
  Complex value;  // defined up to sign; zero at odd-order poles
};

/// z^{-1} Laurent coefficient of sqrt(q) at the pole, up to sign.  Requires
/// pole order >= 2; forced to zero for odd orders.  radius = 0 picks an
/// integration circle automatically inside the zero-free disk.
Residue residue(const QuadraticDifferential& q, int pole_index, double radius = 0.0);

/// Loop integral of the tracked branch of sqrt(q) around the pole; equals
/// 2 pi i times the residue for even order.
Complex sqrt_q_loop_integral(const QuadraticDifferential& q, int pole_index,
                             double radius = 0.0);

/// Truncated expansion of sqrt(q) at the pole in the chart u_scaled =
/// chart_scale * u_canonical.  radius = 0 selects automatically.
PrincipalPart principal_part(const QuadraticDifferential& q, int pole_index,
                             Complex chart_scale = Complex(1), double radius = 0.0);

struct CompatibilityResult {
  bool compatible;
  double residual;          // absolute, after minimizing over sign/start
  double scale;             // normalization used for the relative test
  double alternating_sum;   // with the chosen starting arc
  double two_pi_re_residue;
};

/// Alternating-sum identity between the n-2 distinguished-arc measures and
/// the real part of the residue.  Odd orders are compatible by definition.
CompatibilityResult check_compatibility(const PrincipalPart& P,
                                        const std::vector<double>& local_params,
                                        double tol = 1e-2);

/// Dimension sum(n_i - 1) of the space of compatible principal parts.
int compat_space_dimension(const std::vector<int>& pole_orders);

/// Real dimension 6g - 6 + 2 sum(n_i) of the total space of differentials.
int total_parameter_count(int genus, const std::vector<int>& pole_orders);

}  // namespace folia
