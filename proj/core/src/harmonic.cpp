#include "folia/harmonic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "folia/foliation.hpp"
#include "folia/jsonfmt.hpp"
#include "folia/parallel.hpp"

namespace folia {

void CylinderGrid::validate() const {
  if (!(length > 0)) throw domain_error("cylinder grid: length must be positive");
  if (nx < 8 || ntheta < 16) throw domain_error("cylinder grid: resolution below nx=8, ntheta=16");
}

std::vector<double> sample_boundary(const std::function<double(double)>& f, int ntheta) {
  std::vector<double> out(ntheta);
  for (int j = 0; j < ntheta; ++j) out[j] = f(kTwoPi * j / ntheta);
  return out;
}

std::vector<double> fourier_boundary(const std::vector<std::array<double, 3>>& modes,
                                     int ntheta) {
  std::vector<double> out(ntheta, 0.0);
  for (int j = 0; j < ntheta; ++j) {
    double th = kTwoPi * j / ntheta;
    for (const auto& m : modes) out[j] += m[1] * std::cos(m[0] * th) + m[2] * std::sin(m[0] * th);
  }
  return out;
}

double HarmonicField::row_max_abs(int i) const {
  double v = 0.0;
  for (int j = 0; j < grid.ntheta; ++j) v = std::max(v, std::abs(at(i, j)));
  return v;
}

double HarmonicField::row_mean(int i) const {
  double v = 0.0;
  for (int j = 0; j < grid.ntheta; ++j) v += at(i, j);
  return v / grid.ntheta;
}

double HarmonicField::row_dtheta_max_abs(int i) const {
  double v = 0.0;
  const double inv = 1.0 / (2.0 * grid.dtheta());
  for (int j = 0; j < grid.ntheta; ++j)
    v = std::max(v, std::abs((at(i, j + 1) - at(i, j - 1)) * inv));
  return v;
}

double HarmonicField::interior_residual_max() const {
  const double ax = 1.0 / (grid.dx() * grid.dx());
  const double at2 = 1.0 / (grid.dtheta() * grid.dtheta());
  double worst = 0.0;
  for (int i = 1; i < grid.nx; ++i)
    for (int j = 0; j < grid.ntheta; ++j) {
      double lap = ax * (at(i + 1, j) + at(i - 1, j) - 2 * at(i, j)) +
                   at2 * (at(i, j + 1) + at(i, j - 1) - 2 * at(i, j));
      worst = std::max(worst, std::abs(lap));
    }
  return worst;
}

double HarmonicField::free_boundary_normal_derivative_max() const {
  if (boundary != BoundaryKind::partially_free)
    throw domain_error("normal derivative check applies to partially free fields");
  const int nx = grid.nx;
  const double inv = 1.0 / (2.0 * grid.dx());
  double worst = 0.0;
  for (int j = 0; j < grid.ntheta; ++j) {
    double d = (3.0 * at(nx, j) - 4.0 * at(nx - 1, j) + at(nx - 2, j)) * inv;
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// PCG solver
// ---------------------------------------------------------------------------

namespace {

// Unknowns are rows 1..R of the grid (R = nx-1 for Dirichlet, nx when the
// last row carries the reflection Neumann closure, symmetrized with weight
// 1/2 so the operator stays SPD).
struct StencilSystem {
  int m = 0;       // ntheta
  int R = 0;       // unknown rows
  bool free_end = false;
  double ax = 0, at = 0;

  size_t size() const { return size_t(R) * m; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const double diag = 2 * ax + 2 * at;
    for (int r = 1; r <= R; ++r) {
      const double* row = x.data() + size_t(r - 1) * m;
      const double* below = r >= 2 ? x.data() + size_t(r - 2) * m : nullptr;
      const double* above = r < R ? x.data() + size_t(r) * m : nullptr;
      double* out = y.data() + size_t(r - 1) * m;
      const bool neumann_row = free_end && r == R;
      const double d = neumann_row ? ax + at : diag;
      const double ct = neumann_row ? 0.5 * at : at;
      for (int j = 0; j < m; ++j) {
        double v = d * row[j];
        v -= ct * row[j == 0 ? m - 1 : j - 1];
        v -= ct * row[j == m - 1 ? 0 : j + 1];
        if (below) v -= ax * below[j];
        if (above && !(free_end && r == R)) v -= ax * above[j];
        out[j] = v;
      }
    }
  }

  double diag_at(int r) const {
    return (free_end && r == R) ? ax + at : 2 * ax + 2 * at;
  }
};

SolveStats pcg(const StencilSystem& sys, const std::vector<double>& b,
               std::vector<double>& x, double rel_tol) {
  const size_t n = sys.size();
  std::vector<double> r(n), z(n), p(n), Ap(n);
  sys.apply(x, Ap);
  double bnorm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    r[i] = b[i] - Ap[i];
    bnorm2 += b[i] * b[i];
  }
  SolveStats stats;
  if (bnorm2 == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    stats.converged = true;
    return stats;
  }
  const double stop2 = rel_tol * rel_tol * bnorm2;
  auto precond = [&](const std::vector<double>& rr, std::vector<double>& zz) {
    for (int row = 1; row <= sys.R; ++row) {
      double inv = 1.0 / sys.diag_at(row);
      for (int j = 0; j < sys.m; ++j) {
        size_t idx = size_t(row - 1) * sys.m + j;
        zz[idx] = rr[idx] * inv;
      }
    }
  };
  precond(r, z);
  p = z;
  double rz = 0.0, rnorm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    rz += r[i] * z[i];
    rnorm2 += r[i] * r[i];
  }
  const long iter_cap = 50L * (sys.R + 1) * sys.m;
  double best = rnorm2;
  int since_best = 0;
  long it = 0;
  while (rnorm2 > stop2 && it < iter_cap) {
    sys.apply(p, Ap);
    double pAp = 0.0;
    for (size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0) break;
    double alpha = rz / pAp;
    rnorm2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rnorm2 += r[i] * r[i];
    }
    precond(r, z);
    double rz_new = 0.0;
    for (size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
    if (rnorm2 < 0.99 * best) {
      best = rnorm2;
      since_best = 0;
    } else if (++since_best > 500) {
      break;  // stagnated at the attainable floor
    }
  }
  stats.iterations = static_cast<int>(it);
  stats.relative_residual = std::sqrt(rnorm2 / bnorm2);
  stats.converged = rnorm2 <= stop2;
  return stats;
}

HarmonicField solve_impl(const CylinderGrid& grid, const std::vector<double>& f0,
                         const std::vector<double>* fL, double rel_tol) {
  grid.validate();
  const int m = grid.ntheta;
  if (static_cast<int>(f0.size()) != m || (fL && static_cast<int>(fL->size()) != m))
    throw domain_error("grid mismatch: boundary samples must match ntheta");

  StencilSystem sys;
  sys.m = m;
  sys.free_end = fL == nullptr;
  sys.R = sys.free_end ? grid.nx : grid.nx - 1;
  sys.ax = 1.0 / (grid.dx() * grid.dx());
  sys.at = 1.0 / (grid.dtheta() * grid.dtheta());

  std::vector<double> b(sys.size(), 0.0);
  for (int j = 0; j < m; ++j) b[j] = sys.ax * f0[j];
  if (fL)
    for (int j = 0; j < m; ++j) b[size_t(sys.R - 1) * m + j] += sys.ax * (*fL)[j];

  // initial guess: linear blend for Dirichlet, flat extension otherwise
  std::vector<double> x(sys.size());
  for (int r = 1; r <= sys.R; ++r) {
    double t = double(r) / grid.nx;
    for (int j = 0; j < m; ++j)
      x[size_t(r - 1) * m + j] = fL ? (1 - t) * f0[j] + t * (*fL)[j] : f0[j];
  }

  SolveStats stats = pcg(sys, b, x, rel_tol);
  if (!stats.converged && stats.relative_residual > 1e3 * rel_tol)
    throw domain_error("harmonic solve failed to converge within the iteration cap");

  HarmonicField field;
  field.grid = grid;
  field.boundary = fL ? BoundaryKind::dirichlet : BoundaryKind::partially_free;
  field.stats = stats;
  field.values.assign(size_t(grid.rows()) * m, 0.0);
  for (int j = 0; j < m; ++j) field.values[j] = f0[j];
  for (int r = 1; r <= sys.R; ++r)
    for (int j = 0; j < m; ++j) field.values[size_t(r) * m + j] = x[size_t(r - 1) * m + j];
  if (fL)
    for (int j = 0; j < m; ++j) field.values[size_t(grid.nx) * m + j] = (*fL)[j];
  return field;
}

}  // namespace

HarmonicField solve_dirichlet(const CylinderGrid& grid, const std::vector<double>& f_at_0,
                              const std::vector<double>& f_at_L, double rel_tol) {
  return solve_impl(grid, f_at_0, &f_at_L, rel_tol);
}

HarmonicField solve_partially_free(const CylinderGrid& grid,
                                   const std::vector<double>& f_fixed, double rel_tol) {
  return solve_impl(grid, f_fixed, nullptr, rel_tol);
}

double verify_doubling(const CylinderGrid& grid, const std::vector<double>& f_fixed,
                       double rel_tol) {
  if (static_cast<int>(f_fixed.size()) != grid.ntheta)
    throw domain_error("grid mismatch: boundary samples must match ntheta");
  HarmonicField free_field = solve_partially_free(grid, f_fixed, rel_tol);
  CylinderGrid doubled{2.0 * grid.length, 2 * grid.nx, grid.ntheta};
  HarmonicField dbl = solve_dirichlet(doubled, f_fixed, f_fixed, rel_tol);
  double worst = 0.0;
  for (int i = 0; i <= grid.nx; ++i)
    for (int j = 0; j < grid.ntheta; ++j)
      worst = std::max(worst, std::abs(free_field.at(i, j) - dbl.at(i, j)));
  return worst;
}

double fourier_solution(int mode, double amplitude, double length, double x, double theta) {
  if (mode < 1) throw domain_error("fourier solution: mode must be >= 1");
  if (!(length > 0)) throw domain_error("fourier solution: length must be positive");
  const double n = mode;
  // sinh ratio with all exponents <= 0
  double num = std::exp(n * (x - length)) * (1.0 - std::exp(-2.0 * n * x)) +
               std::exp(-n * x) * (1.0 - std::exp(-2.0 * n * (length - x)));
  double den = 1.0 - std::exp(-2.0 * n * length);
  return (num / den) * amplitude * std::cos(mode * theta);
}

double energy(const HarmonicField& field) {
  const auto& g = field.grid;
  const int m = g.ntheta;
  const double dx = g.dx(), dt = g.dtheta();
  double e = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < m; ++j) {
      double d = (field.at(i + 1, j) - field.at(i, j)) / dx;
      e += d * d * dx * dt;
    }
  for (int i = 0; i <= g.nx; ++i) {
    double height = (i == 0 || i == g.nx) ? 0.5 * dx : dx;
    for (int j = 0; j < m; ++j) {
      double d = (field.at(i, j + 1) - field.at(i, j)) / dt;
      e += d * d * dt * height;
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Hopf extraction
// ---------------------------------------------------------------------------

DiscreteHopf hopf(const HarmonicField& field) {
  const auto& g = field.grid;
  const int m = g.ntheta;
  DiscreteHopf h;
  h.rows = g.nx - 1;
  h.cols = m;
  h.values.resize(size_t(h.rows) * m);
  h.defect.assign(size_t(h.rows) * m, std::numeric_limits<double>::quiet_NaN());
  const double ix = 1.0 / (2.0 * g.dx()), it = 1.0 / (2.0 * g.dtheta());

  std::vector<Complex> p(size_t(h.rows) * m);  // 2i dh/dz, a sqrt-free proxy
  for (int i = 1; i < g.nx; ++i)
    for (int j = 0; j < m; ++j) {
      double dxv = (field.at(i + 1, j) - field.at(i - 1, j)) * ix;
      double dtv = (field.at(i, j + 1) - field.at(i, j - 1)) * it;
      Complex dz = 0.5 * Complex(dxv, -dtv);
      h.values[size_t(i - 1) * m + j] = -4.0 * dz * dz;
      p[size_t(i - 1) * m + j] = Complex(0, 2) * dz;
    }
  for (int i = 2; i < g.nx - 1; ++i)
    for (int j = 0; j < m; ++j) {
      auto P = [&](int ii, int jj) { return p[size_t(ii - 1) * m + ((jj % m) + m) % m]; };
      Complex dxv = (P(i + 1, j) - P(i - 1, j)) * ix;
      Complex dtv = (P(i, j + 1) - P(i, j - 1)) * it;
      h.defect[size_t(i - 1) * m + j] = std::abs(0.5 * (dxv + Complex(0, 1) * dtv));
    }
  return h;
}

PatchField PatchField::sample(double x0, double x1, double y0, double y1, int nx, int ny,
                              const std::function<double(Complex)>& h) {
  if (nx < 3 || ny < 3) throw domain_error("patch: need at least 3x3 nodes");
  PatchField p;
  p.x0 = x0;
  p.y0 = y0;
  p.nx = nx;
  p.ny = ny;
  p.dx = (x1 - x0) / (nx - 1);
  p.dy = (y1 - y0) / (ny - 1);
  p.values.resize(size_t(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      p.values[size_t(j) * nx + i] = h(Complex(x0 + i * p.dx, y0 + j * p.dy));
  return p;
}

DiscreteHopf hopf_patch(const PatchField& patch) {
  DiscreteHopf h;
  h.rows = patch.nx - 2;
  h.cols = patch.ny - 2;
  h.values.resize(size_t(h.rows) * h.cols);
  h.defect.assign(size_t(h.rows) * h.cols, std::numeric_limits<double>::quiet_NaN());
  const double ix = 1.0 / (2.0 * patch.dx), iy = 1.0 / (2.0 * patch.dy);
  std::vector<Complex> p(size_t(h.rows) * h.cols);
  for (int i = 1; i < patch.nx - 1; ++i)
    for (int j = 1; j < patch.ny - 1; ++j) {
      double dxv = (patch.at(i + 1, j) - patch.at(i - 1, j)) * ix;
      double dyv = (patch.at(i, j + 1) - patch.at(i, j - 1)) * iy;
      Complex dz = 0.5 * Complex(dxv, -dyv);
      h.values[size_t(i - 1) * h.cols + (j - 1)] = -4.0 * dz * dz;
      p[size_t(i - 1) * h.cols + (j - 1)] = Complex(0, 2) * dz;
    }
  for (int i = 2; i < patch.nx - 2; ++i)
    for (int j = 2; j < patch.ny - 2; ++j) {
      auto P = [&](int ii, int jj) { return p[size_t(ii - 1) * h.cols + (jj - 1)]; };
      Complex dxv = (P(i + 1, j) - P(i - 1, j)) * ix;
      Complex dyv = (P(i, j + 1) - P(i, j - 1)) * iy;
      h.defect[size_t(i - 1) * h.cols + (j - 1)] =
          std::abs(0.5 * (dxv + Complex(0, 1) * dyv));
    }
  return h;
}

double energy_patch(const PatchField& patch) {
  double e = 0.0;
  for (int j = 0; j < patch.ny; ++j) {
    double height = (j == 0 || j == patch.ny - 1) ? 0.5 * patch.dy : patch.dy;
    for (int i = 0; i + 1 < patch.nx; ++i) {
      double d = (patch.at(i + 1, j) - patch.at(i, j)) / patch.dx;
      e += d * d * patch.dx * height;
    }
  }
  for (int i = 0; i < patch.nx; ++i) {
    double width = (i == 0 || i == patch.nx - 1) ? 0.5 * patch.dx : patch.dx;
    for (int j = 0; j + 1 < patch.ny; ++j) {
      double d = (patch.at(i, j + 1) - patch.at(i, j)) / patch.dy;
      e += d * d * patch.dy * width;
    }
  }
  return e;
}

AnnulusHopf hopf_annulus(double r_in, double r_out, int nx, int ntheta,
                         const std::function<double(Complex)>& h) {
  if (!(0 < r_in && r_in < r_out)) throw domain_error("annulus: need 0 < r_in < r_out");
  const double L = std::log(r_out / r_in);
  const int m = ntheta;
  std::vector<double> vals(size_t(nx + 1) * m);
  std::vector<Complex> zs(size_t(nx + 1) * m);
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j < m; ++j) {
      Complex s(L * i / nx, kTwoPi * j / m);
      Complex z = r_in * std::exp(s);
      zs[size_t(i) * m + j] = z;
      vals[size_t(i) * m + j] = h(z);
    }
  AnnulusHopf out;
  out.rows = nx - 1;
  out.cols = m;
  out.z.resize(size_t(out.rows) * m);
  out.values.assign(size_t(out.rows) * m,
                    Complex(std::numeric_limits<double>::quiet_NaN(), 0));
  const double ix = 1.0 / (2.0 * L / nx), it = 1.0 / (2.0 * kTwoPi / m);
  for (int i = 1; i < nx; ++i)
    for (int j = 0; j < m; ++j) {
      out.z[size_t(i - 1) * m + j] = zs[size_t(i) * m + j];
      if (j == 0 || j == m - 1) continue;  // the seam columns straddle the branch cut
      double dxv = (vals[size_t(i + 1) * m + j] - vals[size_t(i - 1) * m + j]) * ix;
      double dtv = (vals[size_t(i) * m + j + 1] - vals[size_t(i) * m + j - 1]) * it;
      Complex ds = 0.5 * Complex(dxv, -dtv);
      Complex phi_s = -4.0 * ds * ds;
      Complex z = zs[size_t(i) * m + j];
      out.values[size_t(i - 1) * m + j] = phi_s / (z * z);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {
int even_at_least(int v, int floor_v) {
  int n = std::max(v, floor_v);
  return n % 2 == 0 ? n : n + 1;
}
}  // namespace

std::vector<DecayRow> decay_experiment(const std::vector<double>& f_samples,
                                       const std::vector<double>& lengths, int nx,
                                       double rel_tol) {
  const int m = static_cast<int>(f_samples.size());
  if (m < 16) throw domain_error("decay experiment: boundary sampling too coarse");
  double mean = 0.0, amp = 0.0;
  for (double v : f_samples) {
    mean += v;
    amp = std::max(amp, std::abs(v));
  }
  mean /= m;
  if (std::abs(mean) > 1e-12 * std::max(1.0, amp))
    throw domain_error("nonzero-mean input rejected");

  std::vector<DecayRow> rows(lengths.size());
  parallel_for(static_cast<int>(lengths.size()), [&](int k) {
    const double L = lengths[k];
    const int nxk = nx > 0 ? nx : even_at_least(int(std::ceil(L * m / kTwoPi)), 64);
    CylinderGrid grid{L, nxk, m};
    HarmonicField field = solve_dirichlet(grid, f_samples, f_samples, rel_tol);
    DecayRow row;
    row.length = L;
    row.midline_max = field.row_max_abs(nxk / 2);
    row.ratio = row.midline_max / (amp * std::exp(-0.5 * L));
    row.dtheta_midline_max = field.row_dtheta_max_abs(nxk / 2);
    rows[k] = row;
  });
  return rows;
}

std::vector<ExhaustionRow> exhaustion_experiment(Complex a, int n, double delta,
                                                 const std::vector<int>& i_values,
                                                 int ntheta, double rel_tol) {
  if (n < 4 || n % 2 != 0)
    throw domain_error("exhaustion experiment: pole order must be even and >= 4");
  if (!(delta > 0)) throw domain_error("exhaustion experiment: delta must be positive");
  if (i_values.empty() || *std::max_element(i_values.begin(), i_values.end()) < 4)
    throw domain_error("i_max too small (< 4) to observe a plateau");
  for (int i : i_values)
    if (i < 2) throw domain_error("exhaustion experiment: indices must be >= 2");

  const double r_out = std::pow(delta, 0.5 * n);
  std::vector<ExhaustionRow> rows(i_values.size());
  parallel_for(static_cast<int>(i_values.size()), [&](int k) {
    const int i = i_values[k];
    const double r_in = std::pow(delta / i, 0.5 * n);
    const double L = std::log(r_out / r_in);
    const int nxk = even_at_least(int(std::ceil(L * ntheta / kTwoPi)), 48);
    CylinderGrid grid{L, nxk, ntheta};
    std::vector<double> f(ntheta);
    double cmax = 0.0;
    for (int j = 0; j < ntheta; ++j) {
      Complex w = r_in * std::exp(Complex(0, kTwoPi * j / ntheta));
      f[j] = collapsing_value(a, w);
      cmax = std::max(cmax, std::abs(f[j]));
    }
    HarmonicField psi = solve_partially_free(grid, f, rel_tol);
    rows[k] = {i, L, cmax, psi.row_max_abs(nxk)};
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Dumps
// ---------------------------------------------------------------------------

std::string field_to_csv(const HarmonicField& field) {
  std::string out = "x,theta,value\n";
  for (int i = 0; i < field.grid.rows(); ++i) {
    double x = i * field.grid.dx();
    for (int j = 0; j < field.grid.ntheta; ++j) {
      out += format_double(x);
      out += ',';
      out += format_double(j * field.grid.dtheta());
      out += ',';
      out += format_double(field.at(i, j));
      out += '\n';
    }
  }
  return out;
}

static_assert(std::endian::native == std::endian::little,
              "binary field dump assumes a little-endian host");

std::vector<std::uint8_t> field_to_binary(const HarmonicField& field) {
  const std::uint32_t version = 1;
  const std::uint32_t rows = static_cast<std::uint32_t>(field.grid.rows());
  const std::uint32_t m = static_cast<std::uint32_t>(field.grid.ntheta);
  std::vector<std::uint8_t> out(16 + field.values.size() * sizeof(double));
  std::memcpy(out.data(), "FOLH", 4);
  std::memcpy(out.data() + 4, &version, 4);
  std::memcpy(out.data() + 8, &rows, 4);
  std::memcpy(out.data() + 12, &m, 4);
  std::memcpy(out.data() + 16, field.values.data(), field.values.size() * sizeof(double));
  return out;
}

BinaryField field_from_binary(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "FOLH", 4) != 0)
    throw std::runtime_error("binary field: bad magic");
  BinaryField f;
  std::memcpy(&f.version, bytes.data() + 4, 4);
  std::memcpy(&f.rows, bytes.data() + 8, 4);
  std::memcpy(&f.ntheta, bytes.data() + 12, 4);
  const size_t count = size_t(f.rows) * f.ntheta;
  if (bytes.size() != 16 + count * sizeof(double))
    throw std::runtime_error("binary field: payload size mismatch");
  f.values.resize(count);
  std::memcpy(f.values.data(), bytes.data() + 16, count * sizeof(double));
  return f;
}

}  // namespace folia
