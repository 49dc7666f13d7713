#include "folia/qdiff.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

namespace {

// Branch of sqrt(w) closest to a reference value.
Complex sqrt_near(Complex w, Complex ref) {
  Complex s = std::sqrt(w);
  if (ref != Complex(0) && (s * std::conj(ref)).real() < 0.0) return -s;
  return s;
}

}  // namespace

QuadraticDifferential QuadraticDifferential::rational(Poly numerator, Poly denominator) {
  if (numerator.is_zero()) throw domain_error("rational differential: zero numerator");
  if (denominator.is_zero()) throw domain_error("rational differential: zero denominator");
  QuadraticDifferential q;
  q.laurent_ = false;
  q.num_ = std::move(numerator);
  q.den_ = std::move(denominator);

  auto zero_clusters = cluster_roots(q.num_.roots(), 1e-8);
  auto pole_clusters = cluster_roots(q.den_.roots(), 1e-8);
  for (const auto& z : zero_clusters)
    for (const auto& p : pole_clusters)
      if (std::abs(z.location - p.location) < 1e-7 * (1.0 + std::abs(z.location)))
        throw domain_error("rational differential: numerator and denominator share a root");

  int zero_count = 0;
  for (const auto& c : zero_clusters) {
    q.zeros_.push_back({c.location, c.order});
    zero_count += c.order;
  }
  int pole_count = 0;
  for (const auto& c : pole_clusters) {
    q.poles_.push_back({c.location, c.order});
    pole_count += c.order;
  }
  int d_inf = q.num_.degree() - q.den_.degree() + 4;
  if (d_inf > 0) {
    q.poles_.push_back({std::nullopt, d_inf});
    pole_count += d_inf;
  } else if (d_inf < 0) {
    // zero at infinity; kept in the bookkeeping but has no finite location
    zero_count += -d_inf;
  }
  if (zero_count - pole_count != -4)
    throw domain_error("degree bookkeeping violated: zeros - poles != -4");
  return q;
}

QuadraticDifferential QuadraticDifferential::laurent(int pole_order,
                                                     std::vector<SqrtTerm> sqrt_terms) {
  if (pole_order < 3) throw domain_error("Laurent model: pole order must be >= 3");
  if (sqrt_terms.empty()) throw domain_error("Laurent model: empty coefficient sequence");
  std::sort(sqrt_terms.begin(), sqrt_terms.end(),
            [](const SqrtTerm& a, const SqrtTerm& b) { return a.twice_exponent < b.twice_exponent; });
  const int parity = pole_order % 2 == 0 ? 0 : 1;
  for (const auto& t : sqrt_terms) {
    if (((t.twice_exponent % 2) + 2) % 2 != parity)
      throw domain_error("Laurent model: coefficient exponents do not match the pole-order parity");
    if (t.twice_exponent < -pole_order)
      throw domain_error("Laurent model: term below u^{-n/2}");
  }
  if (sqrt_terms.front().twice_exponent != -pole_order ||
      std::abs(sqrt_terms.front().coeff) == 0.0)
    throw domain_error("Laurent model: leading u^{-n/2} coefficient must be nonzero");

  QuadraticDifferential q;
  q.laurent_ = true;
  q.laurent_order_ = pole_order;
  q.terms_ = std::move(sqrt_terms);
  q.poles_.push_back({Complex(0), pole_order});

  // Zeros of q are roots of F(u) = u^{n/2} sqrt(q), an honest polynomial.
  int max_shift = 0;
  for (const auto& t : q.terms_)
    max_shift = std::max(max_shift, (t.twice_exponent + pole_order) / 2);
  std::vector<Complex> fc(max_shift + 1, Complex(0));
  for (const auto& t : q.terms_) fc[(t.twice_exponent + pole_order) / 2] += t.coeff;
  Poly f(std::move(fc));
  for (const auto& c : cluster_roots(f.roots(), 1e-8)) {
    if (std::abs(c.location) < 1e-12)
      throw domain_error("Laurent model: zero at pole (pole order is not exact)");
    q.zeros_.push_back({c.location, 2 * c.order});  // q = F^2 u^{-n}
  }
  return q;
}

int QuadraticDifferential::pole_index_at_infinity() const {
  for (size_t i = 0; i < poles_.size(); ++i)
    if (!poles_[i].location) return static_cast<int>(i);
  return -1;
}

Complex QuadraticDifferential::eval(Complex z) const {
  if (laurent_) {
    Complex s = sqrt_eval(z);
    return s * s;
  }
  return num_(z) / den_(z);
}

Complex QuadraticDifferential::sqrt_eval(Complex z) const {
  if (!laurent_) throw domain_error("sqrt_eval: only available for Laurent models");
  Complex lg = std::log(z);
  Complex acc = 0.0;
  for (const auto& t : terms_) acc += t.coeff * std::exp(0.5 * double(t.twice_exponent) * lg);
  return acc;
}

Complex QuadraticDifferential::eval_local(int pole_index, Complex u) const {
  const Pole& p = poles_.at(pole_index);
  if (laurent_) return eval(u);
  if (p.location) return eval(*p.location + u);
  // chart u = 1/z at infinity: q_u(u) = q(1/u) / u^4
  Complex z = 1.0 / u;
  Complex u2 = u * u;
  return eval(z) / (u2 * u2);
}

std::vector<Complex> QuadraticDifferential::zeros_local(int pole_index) const {
  const Pole& p = poles_.at(pole_index);
  std::vector<Complex> out;
  out.reserve(zeros_.size());
  for (const auto& z : zeros_) {
    if (laurent_ || p.location) {
      out.push_back(z.location - (p.location ? *p.location : Complex(0)));
    } else {
      if (std::abs(z.location) < 1e-300) continue;  // maps beyond any disk
      out.push_back(1.0 / z.location);
    }
  }
  return out;
}

double QuadraticDifferential::zero_scale() const {
  double s = 1.0;
  for (const auto& z : zeros_) s = std::max(s, std::abs(z.location));
  return s;
}

// ---------------------------------------------------------------------------
// Pole-local series extraction
// ---------------------------------------------------------------------------

namespace {

struct SeriesOptions {
  int samples = 1024;
  double radius;
  Complex chart_scale;
};

// Laurent coefficients a_0..a_max of F(u) = sqrt(q_local(u)) u^{n/2} computed
// by trapezoid sums on a circle, with the branch of sqrt tracked continuously
// (F is single-valued for either parity of n).
std::vector<Complex> series_coefficients(const QuadraticDifferential& q, int pole_index,
                                         int max_degree, const SeriesOptions& opts) {
  const int n = q.poles().at(pole_index).order;
  const int m = opts.samples;
  const double r = opts.radius;
  const Complex lam = opts.chart_scale;

  // q in the scaled chart u = lam * u_canonical.
  auto qv = [&](double theta) {
    Complex u = r * std::exp(Complex(0, theta));
    return q.eval_local(pole_index, u / lam) / (lam * lam);
  };

  std::vector<Complex> F(m);
  Complex ref = std::sqrt(qv(0.0));
  for (int k = 0; k < m; ++k) {
    double theta = kTwoPi * k / m;
    Complex s = sqrt_near(qv(theta), ref);
    ref = s;
    F[k] = s * std::pow(r, 0.5 * n) * std::exp(Complex(0, 0.5 * n * theta));
  }
  // single-valuedness check of F around the loop
  Complex s_close = sqrt_near(qv(kTwoPi), ref);
  Complex f_close = s_close * std::pow(r, 0.5 * n) * std::exp(Complex(0, kPi * n));
  double fmax = 0.0;
  for (const auto& v : F) fmax = std::max(fmax, std::abs(v));
  if (std::abs(f_close - F[0]) > 1e-6 * (fmax + 1e-300))
    throw domain_error("insufficient expansion order: sqrt branch fails to close around the pole");

  std::vector<Complex> coeffs(max_degree + 1);
  for (int j = 0; j <= max_degree; ++j) {
    Complex acc = 0.0;
    for (int k = 0; k < m; ++k)
      acc += F[k] * std::exp(Complex(0, -kTwoPi * j * k / m));
    coeffs[j] = acc / (double(m) * std::pow(r, j));
  }
  return coeffs;
}

double default_radius(const QuadraticDifferential& q, int pole_index, Complex chart_scale) {
  double rmin = std::numeric_limits<double>::infinity();
  for (const auto& z : q.zeros_local(pole_index)) rmin = std::min(rmin, std::abs(z * chart_scale));
  if (!std::isfinite(rmin)) return 0.5 * std::abs(chart_scale);
  return 0.45 * rmin;
}

void check_contour_clear(const QuadraticDifferential& q, int pole_index, double radius,
                         Complex chart_scale) {
  for (const auto& z : q.zeros_local(pole_index)) {
    double a = std::abs(z * chart_scale);
    if (std::abs(a - radius) < 0.02 * radius)
      throw domain_error("zero on contour: shrink the integration radius");
    if (a < radius)
      throw domain_error("zero on contour: a zero of q lies inside the integration circle");
  }
}

}  // namespace

PrincipalPart principal_part(const QuadraticDifferential& q, int pole_index,
                             Complex chart_scale, double radius) {
  const Pole& pole = q.poles().at(pole_index);
  const int n = pole.order;
  if (n < 3) throw domain_error("principal part requires pole order >= 3");

  PrincipalPart P;
  P.pole_order = n;
  const int deg = P.expected_degree();

  if (q.is_laurent() && chart_scale == Complex(1)) {
    P.coefficients.assign(deg + 1, Complex(0));
    for (const auto& t : q.sqrt_terms()) {
      int j = (t.twice_exponent + n) / 2;
      if (j >= 0 && j <= deg) P.coefficients[j] += t.coeff;
    }
    P.validate();
    return P;
  }

  SeriesOptions opts;
  opts.chart_scale = chart_scale;
  opts.radius = radius > 0 ? radius : default_radius(q, pole_index, chart_scale);
  check_contour_clear(q, pole_index, opts.radius, chart_scale);

  // Expansion computed past deg so agreement between two resolutions can be
  // checked; explicit failure if the needed coefficients are unstable.
  auto c1 = series_coefficients(q, pole_index, deg + 2, opts);
  opts.samples *= 2;
  opts.radius *= 0.7;
  auto c2 = series_coefficients(q, pole_index, deg + 2, opts);
  double scale = 0.0;
  for (const auto& v : c1) scale = std::max(scale, std::abs(v));
  for (int j = 0; j <= deg; ++j)
    if (std::abs(c1[j] - c2[j]) > 1e-7 * (scale + 1e-300))
      throw domain_error("insufficient expansion order: series coefficients did not stabilize");

  P.coefficients.assign(c2.begin(), c2.begin() + deg + 1);
  if (std::abs(P.coefficients[0]) < 1e-9 * (scale + 1e-300))
    throw domain_error("zero at pole: leading coefficient vanishes (pole order is not exact)");
  return P;
}

Residue residue(const QuadraticDifferential& q, int pole_index, double radius) {
  const Pole& pole = q.poles().at(pole_index);
  if (pole.order < 2) throw domain_error("pole order < 2: residue undefined");
  if (pole.order % 2 == 1) return {Complex(0)};

  if (q.is_laurent()) {
    for (const auto& t : q.sqrt_terms())
      if (t.twice_exponent == -2) return {t.coeff};
    return {Complex(0)};
  }
  PrincipalPart P = principal_part(q, pole_index, Complex(1), radius);
  return {P.residue()};
}

Complex sqrt_q_loop_integral(const QuadraticDifferential& q, int pole_index, double radius) {
  const Pole& pole = q.poles().at(pole_index);
  if (pole.order < 2) throw domain_error("pole order < 2: residue undefined");
  const double r =
      radius > 0 ? radius : default_radius(q, pole_index, Complex(1));
  check_contour_clear(q, pole_index, r, Complex(1));

  const int m = 2048;
  Complex ref = std::sqrt(q.eval_local(pole_index, Complex(r, 0)));
  Complex acc = 0.0;
  for (int k = 0; k < m; ++k) {
    double theta = kTwoPi * k / m;
    Complex u = r * std::exp(Complex(0, theta));
    Complex s = sqrt_near(q.eval_local(pole_index, u), ref);
    ref = s;
    acc += s * Complex(0, 1) * u;  // du = i u dtheta
  }
  return acc * (kTwoPi / m);
}

Complex PrincipalPart::residue() const {
  if (pole_order % 2 == 1) return Complex(0);
  const int top = expected_degree();
  return top < static_cast<int>(coefficients.size()) ? coefficients[top] : Complex(0);
}

void PrincipalPart::validate() const {
  if (pole_order < 3) throw domain_error("principal part: pole order must be >= 3");
  if (static_cast<int>(coefficients.size()) != expected_degree() + 1)
    throw domain_error("principal part: coefficient count does not match the parity rule");
  if (coefficients.empty() || std::abs(coefficients[0]) == 0.0)
    throw domain_error("principal part: constant term must be nonzero");
}

PrincipalPart PrincipalPart::canonical_sign() const {
  for (const auto& c : coefficients) {
    if (std::abs(c) == 0.0) continue;
    bool flip = c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0);
    if (!flip) return *this;
    PrincipalPart out = *this;
    for (auto& v : out.coefficients) v = -v;
    return out;
  }
  return *this;
}

bool PrincipalPart::equivalent(const PrincipalPart& a, const PrincipalPart& b, double tol) {
  if (a.pole_order != b.pole_order) return false;
  if (a.coefficients.size() != b.coefficients.size()) return false;
  double scale = 0.0;
  for (const auto& c : a.coefficients) scale = std::max(scale, std::abs(c));
  for (const auto& c : b.coefficients) scale = std::max(scale, std::abs(c));
  bool same = true, negated = true;
  for (size_t i = 0; i < a.coefficients.size(); ++i) {
    if (std::abs(a.coefficients[i] - b.coefficients[i]) > tol * scale) same = false;
    if (std::abs(a.coefficients[i] + b.coefficients[i]) > tol * scale) negated = false;
  }
  return same || negated;
}

CompatibilityResult check_compatibility(const PrincipalPart& P,
                                        const std::vector<double>& local_params,
                                        double tol) {
  const int n = P.pole_order;
  if (static_cast<int>(local_params.size()) != n - 2)
    throw domain_error("check_compatibility: length of local_params != n - 2");
  CompatibilityResult res{};
  if (n % 2 == 1) {
    res.compatible = true;
    res.residual = 0.0;
    res.scale = 1.0;
    return res;
  }
  double s = 0.0, total = 0.0;
  for (size_t j = 0; j < local_params.size(); ++j) {
    s += (j % 2 == 0 ? -1.0 : 1.0) * local_params[j];  // (-1)^j with j from 1
    total += std::abs(local_params[j]);
  }
  const double target = kTwoPi * P.residue().real();
  // sign of the sum depends on the starting arc, the residue carries its own
  // sign ambiguity: minimize over both parities
  res.residual = std::min(std::abs(s - target), std::abs(s + target));
  res.alternating_sum = s;
  res.two_pi_re_residue = target;
  res.scale = std::max({std::abs(target), total, 1e-30});
  res.compatible = res.residual <= tol * res.scale;
  return res;
}

int compat_space_dimension(const std::vector<int>& pole_orders) {
  if (pole_orders.empty()) throw domain_error("empty order list");
  int dim = 0;
  for (int n : pole_orders) {
    if (n < 3) throw domain_error("pole orders must be >= 3");
    dim += n - 1;
  }
  return dim;
}

int total_parameter_count(int genus, const std::vector<int>& pole_orders) {
  int sum = 0;
  for (int n : pole_orders) sum += n;
  return 6 * genus - 6 + 2 * sum;
}

}  // namespace folia
