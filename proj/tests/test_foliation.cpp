#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "doctest.h"
#include "folia/foliation.hpp"
#include "folia/qdiff.hpp"

using folia::Arc;
using folia::Complex;
using folia::LeafKind;
using folia::Poly;
using folia::QuadraticDifferential;
using folia::Termination;

namespace {

QuadraticDifferential q_const() {  // dz^2
  return QuadraticDifferential::rational(Poly({Complex(1)}));
}
QuadraticDifferential q_z() {  // z dz^2
  return QuadraticDifferential::rational(Poly({Complex(0), Complex(1)}));
}
QuadraticDifferential q_z2m1() {  // (z^2 - 1) dz^2
  return QuadraticDifferential::rational(Poly({Complex(-1), Complex(0), Complex(1)}));
}
QuadraticDifferential q_z2p1() {  // (z^2 + 1) dz^2
  return QuadraticDifferential::rational(Poly({Complex(1), Complex(0), Complex(1)}));
}
QuadraticDifferential q_z3mz() {  // (z^3 - z) dz^2
  return QuadraticDifferential::rational(
      Poly({Complex(0), Complex(-1), Complex(0), Complex(1)}));
}

// Composite-Simpson oracle, independent of the adaptive quadrature code path.
double simpson_oracle(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("horizontal trajectory of dz^2 runs straight along the real axis") {
  auto t = folia::trace_trajectory(q_const(), Complex(0), LeafKind::horizontal);
  CHECK(t.termination.kind == Termination::Kind::escaped_to_pole);
  for (const auto& p : t.points) CHECK(std::abs(p.imag()) < 1e-9);
  CHECK(t.points.back().real() > 2.0);
  CHECK(t.invariant_drift < 1e-10);
}

TEST_CASE("three-pronged zero of z dz^2") {
  auto angles = folia::detail::prong_angles(Complex(1), 1, false);
  REQUIRE(angles.size() == 3);
  CHECK(angles[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(angles[1] == doctest::Approx(2 * folia::kPi / 3).epsilon(1e-12));
  CHECK(angles[2] == doctest::Approx(4 * folia::kPi / 3).epsilon(1e-12));

  // each separatrix escapes along its prong direction
  auto q = q_z();
  for (double th : angles) {
    Complex dir = std::exp(Complex(0, th));
    auto t = folia::trace_trajectory(q, 1e-3 * dir, LeafKind::horizontal, 1, {}, dir);
    REQUIRE(t.termination.kind == Termination::Kind::escaped_to_pole);
    double final_angle = std::arg(t.points.back());
    double diff = std::remainder(final_angle - th, folia::kTwoPi);
    CHECK(std::abs(diff) < 1e-6);
  }
}

TEST_CASE("horizontal drift stays below 1e-8 per unit flat length") {
  auto t = folia::trace_trajectory(q_z2m1(), Complex(2.0, 0.3), LeafKind::horizontal);
  CHECK(t.flat_length() > 1.0);
  CHECK(t.invariant_drift / t.flat_length() < 1e-8);
}

TEST_CASE("transverse measure basics") {
  // unit vertical segment against dz^2
  double mu = folia::transverse_measure(q_const(), Arc::segment(Complex(0), Complex(0, 1)));
  CHECK(mu == doctest::Approx(1.0).epsilon(1e-12));

  // (z^2-1) dz^2 across the real segment: oracle pi/2
  double oracle = simpson_oracle(
      [](double x) { return std::sqrt(std::max(0.0, 1.0 - x * x)); }, -1, 1, 20000);
  CHECK(oracle == doctest::Approx(folia::kPi / 2).epsilon(1e-6));
  double mu2 =
      folia::transverse_measure(q_z2m1(), Arc::segment(Complex(-1, 0), Complex(1, 0)));
  CHECK(mu2 == doctest::Approx(folia::kPi / 2).epsilon(1e-8));
}

TEST_CASE("transverse measure is additive and reparametrization invariant") {
  auto q = q_z2m1();
  Complex a(-0.8, 0.1), b(0.9, -0.2);
  Complex mid = 0.3 * a + 0.7 * b;
  double whole = folia::transverse_measure(q, Arc::segment(a, b), 1e-11);
  double parts = folia::transverse_measure(q, Arc::segment(a, mid), 1e-11) +
                 folia::transverse_measure(q, Arc::segment(mid, b), 1e-11);
  CHECK(whole == doctest::Approx(parts).epsilon(1e-9));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> amp(0.05, 0.45);
  for (int trial = 0; trial < 3; ++trial) {
    double c = amp(rng);
    Arc warped;
    warped.t0 = 0.0;
    warped.t1 = 1.0;
    warped.gamma = [=](double u) {
      double s = u + c * u * (1 - u);
      return a + s * (b - a);
    };
    warped.dgamma = [=](double u) {
      double ds = 1 + c * (1 - 2 * u);
      return ds * (b - a);
    };
    double mu = folia::transverse_measure(q, warped, 1e-11);
    CHECK(mu == doctest::Approx(whole).epsilon(1e-9));
  }
}

TEST_CASE("singular points in the arc interior are rejected") {
  // the segment (0, 2) passes through the zero at z = 1
  CHECK_THROWS_AS(
      folia::transverse_measure(q_z2m1(), Arc::segment(Complex(0, 0), Complex(2, 0))),
      folia::domain_error);
}

TEST_CASE("distinguished points of 1/w^5 dw^2 at radius 1") {
  auto q = QuadraticDifferential::laurent(5, {{-5, Complex(1)}});
  auto dp = folia::distinguished_points(q, 0, 1.0);
  REQUIRE(dp.angles.size() == 3);
  CHECK(dp.angles[0] == doctest::Approx(folia::kPi / 3).epsilon(1e-9));
  CHECK(dp.angles[1] == doctest::Approx(folia::kPi).epsilon(1e-9));
  CHECK(dp.angles[2] == doctest::Approx(5 * folia::kPi / 3).epsilon(1e-9));
}

TEST_CASE("distinguished points of the even normal form sit at equal angles") {
  // the residue term perturbs the tangencies by O(|a| r^{n/2 - 1})
  for (int n : {4, 6, 8}) {
    auto q = QuadraticDifferential::laurent(n, {{-n, Complex(1)}, {-2, Complex(0.3)}});
    auto dp = folia::distinguished_points(q, 0, 0.01);
    REQUIRE(static_cast<int>(dp.angles.size()) == n - 2);
    for (int k = 0; k < n - 2; ++k) {
      double expect = (1.0 + 2.0 * k) * folia::kPi / (n - 2);
      CHECK(std::abs(dp.angles[k] - expect) < 5e-3);
    }
  }
}

TEST_CASE("distinguished points of (z^2-1) dz^2 at infinity") {
  auto q = q_z2m1();
  auto dp = folia::distinguished_points(q, q.pole_index_at_infinity(), 0.2);
  CHECK(dp.angles.size() == 4);
  CHECK(dp.arc_measures.size() == 4);
}

TEST_CASE("alternating sum of arc measures equals 2 pi Re(a), radius independent") {
  auto q = QuadraticDifferential::laurent(6, {{-6, Complex(1)}, {-2, Complex(0.3)}});
  auto dp1 = folia::distinguished_points(q, 0, 0.4);
  auto dp2 = folia::distinguished_points(q, 0, 0.2);
  double target = folia::kTwoPi * 0.3;
  CHECK(std::abs(std::abs(dp1.alternating_sum()) - target) < 0.01 * target);
  CHECK(std::abs(std::abs(dp2.alternating_sum()) - target) < 0.01 * target);
  CHECK(std::abs(std::abs(dp1.alternating_sum()) - std::abs(dp2.alternating_sum())) <
        0.005 * target);
}

TEST_CASE("zeros inside the disk are detected") {
  auto q = QuadraticDifferential::laurent(6, {{-6, Complex(1)}, {-2, Complex(0.3)}});
  // F(z) = 1 + 0.3 z^2 has roots at |z| = sqrt(10/3) ~ 1.83
  CHECK_THROWS_AS(folia::distinguished_points(q, 0, 2.0), folia::domain_error);
}

TEST_CASE("strip decomposition of z dz^2: three half-planes, no strips") {
  auto sk = folia::strip_decomposition(q_z());
  CHECK(sk.half_planes.size() == 3);
  CHECK(sk.strips.empty());
  CHECK(sk.saddle_connections.empty());
  CHECK(sk.separatrices.size() == 3);
}

TEST_CASE("strip decomposition of (z^2 - 1) dz^2") {
  auto sk = folia::strip_decomposition(q_z2m1());
  CHECK(sk.half_planes.size() == 4);
  REQUIRE(sk.strips.size() == 1);
  const auto& strip = sk.strips[0];
  CHECK(strip.width == doctest::Approx(folia::kPi / 2).epsilon(1e-6));
  CHECK(std::abs(strip.width - strip.width_check) < 1e-6);
  CHECK(std::abs(strip.period - Complex(0, folia::kPi / 2)) < 1e-6);
  CHECK(strip.zero_a != strip.zero_b);
}

TEST_CASE("strip decomposition of (z^2 + 1) dz^2") {
  auto sk = folia::strip_decomposition(q_z2p1());
  CHECK(sk.half_planes.size() == 4);
  REQUIRE(sk.strips.size() == 1);
  CHECK(sk.strips[0].width == doctest::Approx(folia::kPi / 2).epsilon(1e-6));
}

TEST_CASE("saddle connection of (z^3 - z) dz^2 is detected") {
  CHECK_THROWS_WITH_AS(folia::strip_decomposition(q_z3mz()),
                       doctest::Contains("saddle connection"), folia::domain_error);
  auto sk = folia::strip_decomposition_allow_saddles(q_z3mz());
  CHECK(!sk.saddle_connections.empty());
}

TEST_CASE("generic order-7 example satisfies the strip-count law") {
  // breaking the z -> -z symmetry of z^3 - z removes the saddle connection
  auto q = QuadraticDifferential::rational(
      Poly({Complex(0, 0.3), Complex(-1), Complex(0), Complex(1)}));
  auto sk = folia::strip_decomposition(q);
  CHECK(sk.half_planes.size() == 5);
  CHECK(sk.strips.size() == 2);  // chi = 6*0 - 6 + (7 + 1)
  for (const auto& s : sk.strips) {
    CHECK(s.width > 0);
    CHECK(std::abs(s.width - s.width_check) < 1e-6);
  }
}

TEST_CASE("vertical leaf through the strip of (z^2 - 1) dz^2 carries measure pi/2") {
  auto sk = folia::strip_decomposition(q_z2m1());
  auto q = q_z2m1();
  double total = 0.0;
  for (int orient : {1, -1}) {
    auto t = folia::trace_trajectory(q, Complex(0, 0.01), LeafKind::vertical, orient);
    REQUIRE(t.termination.kind == Termination::Kind::escaped_to_pole);
    std::optional<folia::detail::Crossing> best;
    for (const auto& sep : sk.separatrices) {
      auto c = folia::detail::first_crossing(t.points, sep.traj.points);
      if (c && (!best || c->path_seg < best->path_seg)) best = c;
    }
    REQUIRE(best.has_value());
    // |Im W| at the crossing = transverse measure from the start to the exit
    size_t seg = best->path_seg;
    Complex w = t.w_integral[seg] +
                best->path_t * (t.w_integral[seg + 1] - t.w_integral[seg]);
    total += std::abs(w.imag());
  }
  CHECK(total == doctest::Approx(folia::kPi / 2).epsilon(2e-3));
}

TEST_CASE("collapsing values of the quotient model") {
  // a = 0: -sin(2 theta) / r^2
  for (double r : {0.5, 1.0, 2.0})
    for (double th : {0.3, 1.1, 2.9}) {
      Complex w = r * std::exp(Complex(0, th));
      CHECK(folia::collapsing_value(Complex(0), w) ==
            doctest::Approx(-std::sin(2 * th) / (r * r)).epsilon(1e-12));
    }
  // mean zero on circles for any a
  Complex a(0.4, -0.7);
  for (double r : {0.3, 1.7}) {
    double mean = 0.0;
    const int m = 512;
    for (int k = 0; k < m; ++k)
      mean += folia::collapsing_value(a, r * std::exp(Complex(0, folia::kTwoPi * k / m)));
    CHECK(std::abs(mean / m) < 1e-12);
  }
  CHECK(folia::collapsing_value(Complex(0, 1), Complex(1)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(folia::collapsing_value(Complex(0), Complex(0)), folia::domain_error);
}

TEST_CASE("tracing from a singular point is rejected") {
  CHECK_THROWS_AS(folia::trace_trajectory(q_z(), Complex(0), LeafKind::horizontal),
                  folia::domain_error);
}
