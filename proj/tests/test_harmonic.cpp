#include <cmath>
#include <random>

#include "doctest.h"
#include "folia/harmonic.hpp"

using folia::Complex;
using folia::CylinderGrid;

namespace {

std::vector<double> random_zero_mean_modes(std::mt19937& rng, int ntheta, int max_mode) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<std::array<double, 3>> modes;
  for (int n = 1; n <= max_mode; ++n)
    modes.push_back({double(n), amp(rng), amp(rng)});
  return folia::fourier_boundary(modes, ntheta);
}

}  // namespace

TEST_CASE("constant boundary data gives a constant field") {
  CylinderGrid grid{2.0, 16, 32};
  std::vector<double> f(grid.ntheta, 3.25);
  auto field = folia::solve_dirichlet(grid, f, f);
  for (int i = 0; i <= grid.nx; ++i)
    for (int j = 0; j < grid.ntheta; ++j)
      CHECK(field.at(i, j) == doctest::Approx(3.25).epsilon(1e-10));

  auto free_field = folia::solve_partially_free(grid, f);
  for (int i = 0; i <= grid.nx; ++i)
    CHECK(free_field.row_max_abs(i) == doctest::Approx(3.25).epsilon(1e-10));
}

TEST_CASE("Dirichlet solution matches the separated closed form") {
  CylinderGrid grid{4.0, 96, 96};
  auto f = folia::fourier_boundary({{1, 1, 0}}, grid.ntheta);
  auto field = folia::solve_dirichlet(grid, f, f, 1e-12);
  double worst = 0.0;
  for (int i = 0; i <= grid.nx; ++i)
    for (int j = 0; j < grid.ntheta; ++j) {
      double exact = folia::fourier_solution(1, 1.0, grid.length, i * grid.dx(),
                                             j * grid.dtheta());
      worst = std::max(worst, std::abs(field.at(i, j) - exact));
    }
  CHECK(worst < 5e-4);
  // midline value 1 / cosh(L/2)
  CHECK(field.row_max_abs(grid.nx / 2) ==
        doctest::Approx(1.0 / std::cosh(2.0)).epsilon(1e-3));
}

TEST_CASE("grid refinement is second order against the closed form") {
  auto err_at = [](int n) {
    CylinderGrid grid{2.0, n, n};
    auto f = folia::fourier_boundary({{2, 1, 0}}, grid.ntheta);
    auto field = folia::solve_dirichlet(grid, f, f, 1e-12);
    double worst = 0.0;
    for (int i = 0; i <= grid.nx; ++i)
      for (int j = 0; j < grid.ntheta; ++j) {
        double exact = folia::fourier_solution(2, 1.0, grid.length, i * grid.dx(),
                                               j * grid.dtheta());
        worst = std::max(worst, std::abs(field.at(i, j) - exact));
      }
    return worst;
  };
  double e64 = err_at(64), e128 = err_at(128);
  CHECK(e64 / e128 >= 3.5);
}

TEST_CASE("discrete maximum principle") {
  CylinderGrid grid{2.0, 32, 64};
  auto f0 = folia::fourier_boundary({{1, 0.7, 0.2}, {3, -0.4, 0.0}}, grid.ntheta);
  auto fL = folia::fourier_boundary({{2, -0.3, 0.5}}, grid.ntheta);
  auto field = folia::solve_dirichlet(grid, f0, fL);
  double lo = 1e300, hi = -1e300;
  for (double v : f0) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : fL) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int i = 1; i < grid.nx; ++i)
    for (int j = 0; j < grid.ntheta; ++j) {
      CHECK(field.at(i, j) >= lo - 1e-9);
      CHECK(field.at(i, j) <= hi + 1e-9);
    }
  CHECK(field.interior_residual_max() < 1e-6);
}

TEST_CASE("partially free solution reaches 1/cosh(L) at the free boundary") {
  CylinderGrid grid{4.0, 128, 64};
  auto f = folia::fourier_boundary({{1, 1, 0}}, grid.ntheta);
  auto field = folia::solve_partially_free(grid, f, 1e-12);
  CHECK(field.row_max_abs(grid.nx) ==
        doctest::Approx(1.0 / std::cosh(4.0)).epsilon(2e-3));
}

TEST_CASE("free-boundary normal derivative shrinks at second order or better") {
  auto deriv_at = [](int n) {
    CylinderGrid grid{2.0, n, 64};
    auto f = folia::fourier_boundary({{1, 1, 0}, {2, 0.5, 0.3}}, 64);
    auto field = folia::solve_partially_free(grid, f, 1e-13);
    return field.free_boundary_normal_derivative_max();
  };
  double d32 = deriv_at(32), d64 = deriv_at(64);
  CHECK(d32 < 1e-2);
  CHECK(d32 / d64 >= 3.5);
}

TEST_CASE("free-boundary mean equals the fixed-boundary mean") {
  CylinderGrid grid{3.0, 48, 64};
  auto f = folia::fourier_boundary({{1, 0.9, -0.3}, {4, 0.2, 0.1}}, grid.ntheta);
  for (double shift : {0.0, 1.7}) {
    std::vector<double> fs = f;
    for (auto& v : fs) v += shift;
    auto field = folia::solve_partially_free(grid, fs, 1e-12);
    CHECK(std::abs(field.row_mean(grid.nx) - shift) < 1e-8);
  }
}

TEST_CASE("doubling identity holds to 1e-8") {
  CylinderGrid grid{2.0, 48, 64};
  auto f = folia::fourier_boundary({{1, 1, 0}}, grid.ntheta);
  CHECK(folia::verify_doubling(grid, f) <= 1e-8);

  std::mt19937 rng(11);
  auto frand = random_zero_mean_modes(rng, grid.ntheta, 5);
  CHECK(folia::verify_doubling(grid, frand) <= 1e-8);

  // doubling is mean-agnostic
  std::vector<double> shifted = frand;
  for (auto& v : shifted) v += 0.8;
  CHECK(folia::verify_doubling(grid, shifted) <= 1e-8);

  CHECK_THROWS_AS(folia::verify_doubling(grid, std::vector<double>(10, 0.0)),
                  folia::domain_error);
}

TEST_CASE("log-domain sinh ratio never overflows") {
  CHECK(folia::fourier_solution(1, 2.0, 4.0, 0.0, 0.0) == doctest::Approx(2.0));
  CHECK(folia::fourier_solution(3, 1.0, 6.0, 3.0, 0.0) ==
        doctest::Approx(1.0 / std::cosh(9.0)).epsilon(1e-12));
  // midline magnitude bounded by 2 M e^{-nL/2}
  for (int n : {1, 2, 3})
    for (double L : {2.0, 6.0}) {
      double v = std::abs(folia::fourier_solution(n, 1.0, L, L / 2, 0.0));
      CHECK(v <= 2.0 * std::exp(-0.5 * n * L) + 1e-15);
    }
  double huge = folia::fourier_solution(5, 1.0, 300.0, 150.0, 0.0);
  CHECK(std::isfinite(huge));
  CHECK(huge < 1e-300);
  CHECK_THROWS_AS(folia::fourier_solution(0, 1.0, 1.0, 0.5, 0.0), folia::domain_error);
}

TEST_CASE("solved fields minimize the discrete energy") {
  CylinderGrid grid{2.0, 24, 32};
  auto f0 = folia::fourier_boundary({{1, 1, 0}, {2, 0.4, -0.2}}, grid.ntheta);
  auto fL = folia::fourier_boundary({{1, -0.5, 0.3}}, grid.ntheta);
  auto field = folia::solve_dirichlet(grid, f0, fL, 1e-12);
  double base = folia::energy(field);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> bump(-1e-2, 1e-2);
  for (int trial = 0; trial < 20; ++trial) {
    auto perturbed = field;
    for (int i = 1; i < grid.nx; ++i)
      for (int j = 0; j < grid.ntheta; ++j)
        perturbed.values[size_t(i) * grid.ntheta + j] += bump(rng);
    CHECK(folia::energy(perturbed) > base);
  }
}

TEST_CASE("Hopf calibration on a Cartesian patch") {
  // h = Im z on the unit-area square: energy 1 and Hopf coefficient exactly 1
  auto imz = folia::PatchField::sample(0, 1, 0, 1, 33, 33,
                                       [](Complex z) { return z.imag(); });
  CHECK(folia::energy_patch(imz) == doctest::Approx(1.0).epsilon(1e-13));
  auto h1 = folia::hopf_patch(imz);
  for (int i = 0; i < h1.rows; ++i)
    for (int j = 0; j < h1.cols; ++j)
      CHECK(std::abs(h1.at(i, j) - Complex(1)) < 1e-13);

  auto rez = folia::PatchField::sample(0, 1, 0, 1, 33, 33,
                                       [](Complex z) { return z.real(); });
  auto hm1 = folia::hopf_patch(rez);
  for (int i = 0; i < hm1.rows; ++i)
    for (int j = 0; j < hm1.cols; ++j)
      CHECK(std::abs(hm1.at(i, j) - Complex(-1)) < 1e-13);
}

TEST_CASE("Hopf of the collapsing function recovers the differential on an annulus") {
  // h = Im((2/3) z^{3/2}) has Hopf coefficient z
  auto h = [](Complex z) {
    double r = std::abs(z);
    double th = std::arg(z);
    if (th < 0) th += folia::kTwoPi;  // branch tracked over [0, 2 pi)
    return (2.0 / 3.0) * std::pow(r, 1.5) * std::sin(1.5 * th);
  };
  auto hopf = folia::hopf_annulus(0.5, 1.5, 256, 256, h);
  double worst = 0.0;
  for (int i = 0; i < hopf.rows; ++i)
    for (int j = 0; j < hopf.cols; ++j) {
      Complex v = hopf.values[size_t(i) * hopf.cols + j];
      if (std::isnan(v.real())) continue;  // seam columns
      Complex z = hopf.z[size_t(i) * hopf.cols + j];
      worst = std::max(worst, std::abs(v - z) / std::abs(z));
    }
  CHECK(worst <= 0.02);
}

TEST_CASE("holomorphy defect of the discrete Hopf shrinks at second order") {
  auto defect_at = [](int n) {
    CylinderGrid grid{2.0, n, n};
    auto f = folia::fourier_boundary({{1, 1, 0}, {2, 0.3, 0.4}}, grid.ntheta);
    auto field = folia::solve_dirichlet(grid, f, f, 1e-13);
    auto h = folia::hopf(field);
    double worst = 0.0;
    // stay away from the boundary rows where the defect stencil is one-sided
    for (int i = h.rows / 4; i < 3 * h.rows / 4; ++i)
      for (int j = 0; j < h.cols; ++j) {
        double d = h.defect_at(i, j);
        if (!std::isnan(d)) worst = std::max(worst, d);
      }
    return worst;
  };
  double d48 = defect_at(48), d96 = defect_at(96);
  CHECK(d48 / d96 >= 3.0);
}

TEST_CASE("decay experiment reports the closed-form ratios") {
  const int m = 64;
  auto f1 = folia::fourier_boundary({{1, 1, 0}}, m);
  auto rows = folia::decay_experiment(f1, {2.0, 4.0, 6.0});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    double expect = 1.0 / std::cosh(r.length / 2);
    CHECK(r.midline_max == doctest::Approx(expect).epsilon(2e-3));
  }
  // ratio tends to 2 from below as L grows
  CHECK(rows[2].ratio == doctest::Approx(2.0).epsilon(1e-2));

  // mode 2 decays like e^{-L}: fitted slope of log(midline) is about -1
  auto f2 = folia::fourier_boundary({{2, 1, 0}}, m);
  auto rows2 = folia::decay_experiment(f2, {2.0, 3.0, 4.0});
  double slope = (std::log(rows2[2].midline_max) - std::log(rows2[0].midline_max)) /
                 (rows2[2].length - rows2[0].length);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.03));

  // nonzero mean is rejected
  std::vector<double> bad(m, 0.5);
  CHECK_THROWS_AS(folia::decay_experiment(bad, {2.0}), folia::domain_error);
}

TEST_CASE("exhaustion experiment mechanics on a small order-4 pole") {
  auto rows = folia::exhaustion_experiment(Complex(0.2, 0.0), 4, 0.5, {2, 4, 8}, 64);
  REQUIRE(rows.size() == 3);
  for (size_t k = 0; k + 1 < rows.size(); ++k) {
    CHECK(rows[k].modulus < rows[k + 1].modulus);
    CHECK(rows[k].boundary_max < rows[k + 1].boundary_max);
  }
  // c_i tracks (i/delta)^n once the mode-2 term dominates
  CHECK(rows[2].boundary_max / rows[1].boundary_max ==
        doctest::Approx(std::pow(2.0, 4)).epsilon(0.1));

  CHECK_THROWS_AS(folia::exhaustion_experiment(Complex(0), 5, 0.5, {2, 4, 8}, 64),
                  folia::domain_error);
  CHECK_THROWS_AS(folia::exhaustion_experiment(Complex(0), 4, 0.5, {2, 3}, 64),
                  folia::domain_error);
}

TEST_CASE("field dumps round-trip") {
  CylinderGrid grid{1.0, 8, 16};
  auto f = folia::fourier_boundary({{1, 0.5, 0.5}}, grid.ntheta);
  auto field = folia::solve_dirichlet(grid, f, f);
  auto bytes = folia::field_to_binary(field);
  CHECK(bytes.size() == 16 + field.values.size() * 8);
  CHECK(bytes[0] == 'F');
  CHECK(bytes[1] == 'O');
  CHECK(bytes[2] == 'L');
  CHECK(bytes[3] == 'H');
  auto back = folia::field_from_binary(bytes);
  CHECK(back.version == 1);
  CHECK(back.rows == 9);
  CHECK(back.ntheta == 16);
  REQUIRE(back.values.size() == field.values.size());
  for (size_t i = 0; i < back.values.size(); ++i) CHECK(back.values[i] == field.values[i]);

  auto csv = folia::field_to_csv(field);
  CHECK(csv.rfind("x,theta,value\n", 0) == 0);
}
