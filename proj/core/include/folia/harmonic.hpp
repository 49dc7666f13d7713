#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "folia/types.hpp"

namespace folia {

/// Flat cylinder [0, L] x S^1 of circumference 2 pi, uniform grid with nx
/// axial intervals (nx + 1 node rows) and ntheta periodic angular samples.
struct CylinderGrid {
  double length = 1.0;
  int nx = 8;
  int ntheta = 16;

  double dx() const { return length / nx; }
  double dtheta() const { return kTwoPi / ntheta; }
  int rows() const { return nx + 1; }
  void validate() const;
  bool operator==(const CylinderGrid&) const = default;
};

enum class BoundaryKind { dirichlet, partially_free };

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

struct HarmonicField {
  CylinderGrid grid;
  BoundaryKind boundary = BoundaryKind::dirichlet;
  std::vector<double> values;  // (nx+1) x ntheta, row-major (x-major)
  SolveStats stats;

  double at(int i, int j) const {
    int m = grid.ntheta;
    return values[size_t(i) * m + ((j % m) + m) % m];
  }
  double row_max_abs(int i) const;
  double row_mean(int i) const;
  /// sup of |d/dtheta| along row i (central differences).
  double row_dtheta_max_abs(int i) const;
  /// max |5-point Laplacian| over interior nodes.
  double interior_residual_max() const;
  /// max |second-order one-sided normal derivative| on the free boundary row.
  double free_boundary_normal_derivative_max() const;
};

std::vector<double> sample_boundary(const std::function<double(double)>& f, int ntheta);
/// Boundary data sum_k c_cos cos(n theta) + c_sin sin(n theta); entries {n, c_cos, c_sin}.
std::vector<double> fourier_boundary(const std::vector<std::array<double, 3>>& modes,
                                     int ntheta);

/// 5-point discrete Laplace equation with Dirichlet rows at x = 0 and x = L,
/// solved by Jacobi-preconditioned conjugate gradients.
HarmonicField solve_dirichlet(const CylinderGrid& grid, const std::vector<double>& f_at_0,
                              const std::vector<double>& f_at_L, double rel_tol = 1e-10);

/// Dirichlet data at x = 0 only; the x = L row carries the reflection
/// (ghost-node) Neumann closure, which makes doubling a discrete identity.
HarmonicField solve_partially_free(const CylinderGrid& grid,
                                   const std::vector<double>& f_fixed,
                                   double rel_tol = 1e-10);

/// Max-norm difference between the partially free solution on [0, L] and the
/// restriction of the doubled (length 2L) Dirichlet solution.
double verify_doubling(const CylinderGrid& grid, const std::vector<double>& f_fixed,
                       double rel_tol = 1e-13);

/// ((sinh n x + sinh n (L - x)) / sinh nL) * M cos(n theta), evaluated with
/// log-domain sinh ratios so large nL cannot overflow.
double fourier_solution(int mode, double amplitude, double length, double x, double theta);

/// sum |grad h|^2 * cell area over the grid faces (no 1/2 factor).
double energy(const HarmonicField& field);

struct DiscreteHopf {
  int rows = 0, cols = 0;
  std::vector<Complex> values;  // -4 (dh/dz)^2 per node of the interior block
  std::vector<double> defect;   // |d/dzbar (2i dh/dz)| per node
  Complex at(int i, int j) const { return values[size_t(i) * cols + j]; }
  double defect_at(int i, int j) const { return defect[size_t(i) * cols + j]; }
};

/// Hopf data of a cylinder field in the conformal coordinate s = x + i theta.
DiscreteHopf hopf(const HarmonicField& field);

/// Uniform Cartesian patch sampled from a callable (calibration surface).
struct PatchField {
  double x0 = 0, y0 = 0, dx = 0, dy = 0;
  int nx = 0, ny = 0;  // node counts
  std::vector<double> values;

  static PatchField sample(double x0, double x1, double y0, double y1, int nx, int ny,
                           const std::function<double(Complex)>& h);
  double at(int i, int j) const { return values[size_t(j) * nx + i]; }
};

DiscreteHopf hopf_patch(const PatchField& patch);
double energy_patch(const PatchField& patch);

/// Hopf coefficient in the z-chart for a function sampled on the annulus
/// r_in <= |z| <= r_out through the log-polar chart z = r_in e^{x + i theta}.
/// theta is sampled on [0, 2 pi); the two columns beside the seam are skipped
/// (NaN) so branch-cut samples such as z^{3/2} stay differentiable.
struct AnnulusHopf {
  int rows = 0, cols = 0;
  std::vector<Complex> z;       // chart point per node
  std::vector<Complex> values;  // Hopf coefficient in the z-chart (NaN at seam)
};
AnnulusHopf hopf_annulus(double r_in, double r_out, int nx, int ntheta,
                         const std::function<double(Complex)>& h);

struct DecayRow {
  double length;
  double midline_max;
  double ratio;  // midline_max / (M e^{-L/2})
  double dtheta_midline_max;
};

/// Dirichlet solves with the same zero-mean data on both ends, reporting the
/// midline sup of |h| and |dh/dtheta| for each length.
std::vector<DecayRow> decay_experiment(const std::vector<double>& f_samples,
                                       const std::vector<double>& lengths, int nx = 0,
                                       double rel_tol = 1e-10);

struct ExhaustionRow {
  int i;
  double modulus;       // log(R_out / R_in) of the covered annulus
  double boundary_max;  // c_i, the max of the collapsing data on the fixed end
  double free_sup;      // sup |psi_i| on the free boundary
};

/// Concentric exhaustion of an even-order pole through the n/2-fold quotient
/// model: for each i, maps the annulus (delta/i)^{n/2} < |w| < delta^{n/2} to
/// a cylinder, imposes the collapsing data on the fixed (inner) end and
/// solves the partially free problem.
std::vector<ExhaustionRow> exhaustion_experiment(Complex a, int n, double delta,
                                                 const std::vector<int>& i_values,
                                                 int ntheta = 128, double rel_tol = 1e-10);

std::string field_to_csv(const HarmonicField& field);

/// 16-byte header {magic "FOLH", version u32, rows u32, ntheta u32}, then
/// little-endian f64 values in row-major (x-major) order.
std::vector<std::uint8_t> field_to_binary(const HarmonicField& field);

struct BinaryField {
  std::uint32_t version = 0, rows = 0, ntheta = 0;
  std::vector<double> values;
};
BinaryField field_from_binary(const std::vector<std::uint8_t>& bytes);

}  // namespace folia
