#include "folia/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "folia/parallel.hpp"
#include "folia/quadrature.hpp"

namespace folia {

namespace {

Complex sqrt_near(Complex w, Complex ref) {
  Complex s = std::sqrt(w);
  if (ref != Complex(0) && (s * std::conj(ref)).real() < 0.0) return -s;
  return s;
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Integral of the tracked branch of sqrt(q) along the straight segment
// [a, b]; ref seeds the branch at a and carries the branch at b on return.
Complex integrate_segment_tracked(const std::function<Complex(Complex)>& q, Complex a,
                                  Complex b, Complex& ref, int npts = 4) {
  const GaussRule& rule = gauss_rule(npts);
  Complex acc = 0.0;
  const Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < npts; ++i) {
    Complex z = mid + half * rule.nodes[i];
    Complex s = sqrt_near(q(z), ref);
    ref = s;
    acc += rule.weights[i] * s;
  }
  ref = sqrt_near(q(b), ref);
  return acc * half;
}

struct ZeroLocal {
  Complex location;
  int order;
  double abs_coeff;   // |leading Taylor coefficient of q|
  double hit_radius;  // euclidean radius matching the flat proximity threshold
};

double flat_to_euclid(double flat, int order, double abs_coeff) {
  // flat(d) = 2/(m+2) sqrt|c| d^{(m+2)/2}
  double m2 = 0.5 * (order + 2);
  return std::pow(flat * (order + 2) / (2.0 * std::sqrt(abs_coeff)), 1.0 / m2);
}

Complex q_derivative(const QuadraticDifferential& q, Complex z) {
  if (q.is_laurent()) {
    // numeric derivative is enough here; Laurent zeros are simple in the corpus
    double h = 1e-6 * (1.0 + std::abs(z));
    return (q.eval(z + h) - q.eval(z - h)) / (2.0 * h);
  }
  const Poly& n = q.numerator();
  const Poly& d = q.denominator();
  Complex nv = n(z), dv = d(z);
  return (n.derivative_at(z) * dv - nv * d.derivative_at(z)) / (dv * dv);
}

std::vector<ZeroLocal> zero_table(const QuadraticDifferential& q, double prox_flat) {
  std::vector<ZeroLocal> out;
  for (const auto& z : q.zeros()) {
    ZeroLocal zl;
    zl.location = z.location;
    zl.order = z.order;
    if (z.order == 1) {
      zl.abs_coeff = std::abs(q_derivative(q, z.location));
    } else {
      // |q^{(m)}(z0)/m!| from a small-circle average
      double r = 1e-3;
      Complex acc = 0.0;
      const int m = 32;
      for (int k = 0; k < m; ++k) {
        Complex u = r * std::exp(Complex(0, kTwoPi * k / m));
        acc += q.eval(z.location + u) / std::pow(u, z.order);
      }
      zl.abs_coeff = std::abs(acc) / m;
    }
    if (zl.abs_coeff <= 0) zl.abs_coeff = 1.0;
    zl.hit_radius = flat_to_euclid(prox_flat, z.order, zl.abs_coeff);
    out.push_back(zl);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Trajectory tracing
// ---------------------------------------------------------------------------

Trajectory trace_trajectory(const QuadraticDifferential& q, Complex start, LeafKind kind,
                            int orientation, const TraceLimits& limits,
                            std::optional<Complex> direction_hint) {
  Trajectory traj;
  traj.kind = kind;
  traj.orientation = orientation;

  const Complex qs = q.eval(start);
  if (!(std::abs(qs) > 0.0) || !std::isfinite(std::abs(qs)))
    throw domain_error("started at singularity");

  const Complex dir =
      (kind == LeafKind::horizontal ? Complex(1, 0) : Complex(0, 1)) * double(orientation);
  auto qfun = [&q](Complex z) { return q.eval(z); };

  // Branch at the start: align the initial velocity with the hint.
  Complex s0 = std::sqrt(qs);
  if (direction_hint && std::abs(*direction_hint) > 0) {
    Complex v = dir / s0;
    if ((v * std::conj(*direction_hint)).real() < 0) s0 = -s0;
  }

  const auto zeros = zero_table(q, limits.zero_prox_flat);
  const double scale = q.zero_scale();

  // A zero we start next to gets a grace length before proximity counts.
  std::vector<bool> grace(zeros.size(), false);
  for (size_t j = 0; j < zeros.size(); ++j)
    if (std::abs(start - zeros[j].location) < 6.0 * zeros[j].hit_radius) grace[j] = true;
  const double grace_flat = 8.0 * limits.zero_prox_flat;

  // Flat-distance proxy from a zero (exact in the local model).
  auto flat_from_zero = [](const ZeroLocal& zl, Complex zz) {
    double d = std::abs(zz - zl.location);
    return 2.0 / (zl.order + 2) * std::sqrt(zl.abs_coeff) * std::pow(d, 0.5 * (zl.order + 2));
  };
  double zero_flat_diam = 0.0;
  for (const auto& za : zeros)
    for (const auto& zb : zeros)
      zero_flat_diam = std::max(zero_flat_diam, flat_from_zero(za, zb.location));
  zero_flat_diam = std::max(zero_flat_diam, 1.0);
  const double horizon = limits.escape_factor * zero_flat_diam;
  // Capping the flat step keeps "monotone for N consecutive steps" meaningful
  // and the output polyline dense enough for crossing detection.
  const double h_cap = std::max(0.25, horizon / 50.0);

  struct PoleWatch {
    std::optional<Complex> location;
    double hull_radius;  // chart radius past which the zero hull is left behind
    double last_radius = std::numeric_limits<double>::infinity();
    int monotone = 0;
  };
  std::vector<PoleWatch> watches;
  for (const auto& p : q.poles()) {
    PoleWatch w;
    w.location = p.location;
    if (p.location) {
      double dmin = scale;
      for (const auto& z : q.zeros()) dmin = std::min(dmin, std::abs(z.location - *p.location));
      w.hull_radius = 0.5 * dmin;
      w.last_radius = std::abs(start - *p.location);
    } else {
      w.hull_radius = 2.0 * scale;
      w.last_radius = std::abs(start);
    }
    watches.push_back(w);
  }

  // Dormand-Prince 5(4) tableau.
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B4[7] = {5179.0 / 57600, 0,          7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  Complex z = start;
  Complex ref = s0;
  double t = 0.0;
  double h = std::min(1e-3 * (1.0 + scale), 0.1 * limits.max_flat_length);
  const double atol = limits.rel_tol * (1.0 + scale);

  traj.points.push_back(z);
  traj.flat_param.push_back(0.0);
  traj.sqrt_q.push_back(ref);
  traj.w_integral.push_back(Complex(0));

  auto rhs = [&](Complex zz, Complex branch_ref, Complex* branch_out) -> std::optional<Complex> {
    Complex qq = q.eval(zz);
    double a = std::abs(qq);
    if (!(a > 0.0) || !std::isfinite(a)) return std::nullopt;
    Complex s = sqrt_near(qq, branch_ref);
    if (branch_out) *branch_out = s;
    return dir / s;
  };

  int steps = 0;
  bool done = false;
  while (!done) {
    if (++steps > limits.max_steps || t >= limits.max_flat_length) {
      traj.termination = {Termination::Kind::max_length, -1};
      break;
    }
    h = std::min({h, h_cap, limits.max_flat_length - t + 1e-15});

    Complex k[7];
    bool ok = true;
    Complex stage_ref = ref;
    for (int i = 0; i < 7 && ok; ++i) {
      Complex zi = z;
      for (int j = 0; j < i; ++j) zi += h * A[i][j] * k[j];
      auto f = rhs(zi, stage_ref, &stage_ref);
      if (!f) {
        ok = false;
        break;
      }
      k[i] = *f;
    }
    if (!ok) {
      h *= 0.25;
      if (h < 1e-14 * (1.0 + scale)) {
        int nearest = -1;
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < zeros.size(); ++j) {
          double d = std::abs(z - zeros[j].location);
          if (d < best) {
            best = d;
            nearest = static_cast<int>(j);
          }
        }
        traj.termination = {Termination::Kind::hit_zero, nearest};
        break;
      }
      continue;
    }

    Complex z5 = z;
    for (int j = 0; j < 6; ++j) z5 += h * A[6][j] * k[j];
    Complex z4 = z;
    for (int j = 0; j < 7; ++j) z4 += h * B4[j] * k[j];
    double err = std::abs(z5 - z4);
    double tol_here = atol + limits.rel_tol * std::abs(z5);
    if (err > tol_here && h > 1e-14 * (1.0 + scale)) {
      h *= std::clamp(0.9 * std::pow(tol_here / (err + 1e-300), 0.2), 0.2, 1.0);
      continue;
    }

    // accepted
    Complex z_prev = z;
    z = z5;
    t += h;
    Complex w_inc = integrate_segment_tracked(qfun, z_prev, z, ref);
    traj.points.push_back(z);
    traj.flat_param.push_back(t);
    traj.sqrt_q.push_back(ref);
    traj.w_integral.push_back(traj.w_integral.back() + w_inc);
    if (err > 0) h *= std::clamp(0.9 * std::pow(tol_here / err, 0.2), 0.2, 5.0);

    // termination checks
    for (size_t j = 0; j < zeros.size() && !done; ++j) {
      if (grace[j]) {
        if (t < grace_flat) continue;
        grace[j] = false;
      }
      if (std::abs(z - zeros[j].location) < zeros[j].hit_radius) {
        traj.termination = {Termination::Kind::hit_zero, static_cast<int>(j)};
        done = true;
      }
    }
    double flat_min = std::numeric_limits<double>::infinity();
    for (const auto& zl : zeros) flat_min = std::min(flat_min, flat_from_zero(zl, z));
    for (size_t pi = 0; pi < watches.size() && !done; ++pi) {
      auto& w = watches[pi];
      double rho = w.location ? std::abs(z - *w.location) : std::abs(z);
      bool towards = w.location ? rho < w.last_radius : rho > w.last_radius;
      w.monotone = towards ? w.monotone + 1 : 0;
      w.last_radius = rho;
      bool past_hull = w.location ? rho < w.hull_radius : rho > w.hull_radius;
      bool deep = w.location ? rho < 1e-4 * w.hull_radius : rho > 50.0 * w.hull_radius;
      if ((past_hull && flat_min > horizon && w.monotone >= limits.monotone_window) || deep) {
        traj.termination = {Termination::Kind::escaped_to_pole, static_cast<int>(pi)};
        done = true;
      }
    }
    if (!done && t > 1.0 && std::abs(z - start) < 1e-9 * (1.0 + scale)) {
      traj.termination = {Termination::Kind::closed, -1};
      done = true;
    }
  }

  Complex w_end = traj.w_integral.back();
  traj.invariant_drift =
      kind == LeafKind::horizontal ? std::abs(w_end.imag()) : std::abs(w_end.real());
  return traj;
}

// ---------------------------------------------------------------------------
// Transverse measure
// ---------------------------------------------------------------------------

Arc Arc::segment(Complex a, Complex b) {
  Arc arc;
  arc.gamma = [a, b](double s) { return a + s * (b - a); };
  arc.dgamma = [a, b](double) { return b - a; };
  arc.t0 = 0.0;
  arc.t1 = 1.0;
  return arc;
}

Arc Arc::circle(Complex center, double radius, double theta0, double theta1) {
  Arc arc;
  arc.gamma = [=](double s) { return center + radius * std::exp(Complex(0, s)); };
  arc.dgamma = [=](double s) { return radius * Complex(0, 1) * std::exp(Complex(0, s)); };
  arc.t0 = theta0;
  arc.t1 = theta1;
  return arc;
}

double MeasurePanels::total() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

double MeasurePanels::signed_total() const {
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i) s += signs[i] * values[i];
  return s;
}

MeasurePanels transverse_measure_panels(const std::function<Complex(Complex)>& q,
                                        const Arc& arc, double tol) {
  if (!(arc.t1 > arc.t0)) throw domain_error("transverse measure: empty arc");
  const int M = 512;
  const double span = arc.t1 - arc.t0;

  // Presample the tracked integrand on interior points.
  std::vector<double> ts(M), g(M), qabs(M);
  std::vector<Complex> s_at(M);
  Complex ref = 0.0;
  for (int k = 0; k < M; ++k) {
    double tk = arc.t0 + span * (k + 0.5) / M;
    Complex qv = q(arc.gamma(tk));
    double a = std::abs(qv);
    if (!(a > 1e-280) || !std::isfinite(a)) throw domain_error("singular point on arc");
    Complex s = sqrt_near(qv, ref);
    ref = s;
    ts[k] = tk;
    s_at[k] = s;
    qabs[k] = a;
    g[k] = (s * arc.dgamma(tk)).imag();
  }

  // An interior zero of q on the arc makes the panel split ill-posed; refine
  // around the smallest presample (endpoint zeros are integrable and allowed).
  {
    double qmax = *std::max_element(qabs.begin(), qabs.end());
    int kmin = int(std::min_element(qabs.begin(), qabs.end()) - qabs.begin());
    if (kmin > 0 && kmin < M - 1) {
      double lo = ts[kmin - 1], hi = ts[kmin + 1];
      for (int it = 0; it < 80; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (std::abs(q(arc.gamma(m1))) < std::abs(q(arc.gamma(m2))))
          hi = m2;
        else
          lo = m1;
      }
      if (std::abs(q(arc.gamma(0.5 * (lo + hi)))) < 1e-18 * qmax)
        throw domain_error("singular point on arc");
    }
  }

  // Bracket sign changes of the tracked integrand and refine.
  MeasurePanels panels;
  panels.boundaries.push_back(arc.t0);
  for (int k = 0; k + 1 < M; ++k) {
    if (g[k] == 0.0 || g[k] * g[k + 1] < 0.0) {
      Complex seed = s_at[k];
      auto gloc = [&](double t) {
        Complex s = sqrt_near(q(arc.gamma(t)), seed);
        return (s * arc.dgamma(t)).imag();
      };
      double root = (g[k] == 0.0)
                        ? ts[k]
                        : brent_root(gloc, ts[k], ts[k + 1], g[k], g[k + 1], 1e-14 * span);
      if (root > panels.boundaries.back() + 1e-13 * span && root < arc.t1)
        panels.boundaries.push_back(root);
    }
  }
  panels.boundaries.push_back(arc.t1);

  // |Im(sqrt(q) gamma')| is branch-independent, so panels integrate the
  // plain principal-branch expression.
  auto f_abs = [&](double t) {
    return std::abs((std::sqrt(q(arc.gamma(t))) * arc.dgamma(t)).imag());
  };
  const double panel_tol = tol / std::max<size_t>(1, panels.boundaries.size());
  for (size_t i = 0; i + 1 < panels.boundaries.size(); ++i) {
    double a = panels.boundaries[i], b = panels.boundaries[i + 1];
    panels.values.push_back(adaptive_integrate(f_abs, a, b, panel_tol));
    double mid = 0.5 * (a + b);
    int k_mid = std::clamp(int((mid - arc.t0) / span * M - 0.5), 0, M - 1);
    panels.signs.push_back(g[k_mid] >= 0 ? 1 : -1);
  }
  return panels;
}

double transverse_measure_fn(const std::function<Complex(Complex)>& q, const Arc& arc,
                             double tol) {
  return transverse_measure_panels(q, arc, tol).total();
}

double transverse_measure(const QuadraticDifferential& q, const Arc& arc, double tol) {
  return transverse_measure_fn([&q](Complex z) { return q.eval(z); }, arc, tol);
}

// ---------------------------------------------------------------------------
// Distinguished points
// ---------------------------------------------------------------------------

double DistinguishedPoints::alternating_sum() const {
  double s = 0.0;
  for (size_t j = 0; j < arc_measures.size(); ++j)
    s += (j % 2 == 0 ? 1.0 : -1.0) * arc_measures[j];
  return s;
}

DistinguishedPoints distinguished_points(const QuadraticDifferential& q, int pole_index,
                                         double radius, double tol) {
  const int n = q.poles().at(pole_index).order;
  if (n < 3) throw domain_error("distinguished points require pole order >= 3");
  if (!(radius > 0)) throw domain_error("distinguished points: radius must be positive");

  for (const Complex& zl : q.zeros_local(pole_index))
    if (std::abs(zl) <= 1.02 * radius)
      throw domain_error("zeros inside disk: not a sink neighborhood");

  auto qloc = [&](Complex u) { return q.eval_local(pole_index, u); };
  // Horizontal direction tangent to the circle at u  <=>  q(u) u^2 in R_{<0}.
  auto G = [&](double theta) {
    Complex u = radius * std::exp(Complex(0, theta));
    return qloc(u) * u * u;
  };
  auto imG = [&](double theta) { return G(theta).imag(); };

  std::vector<double> roots = find_sign_changes(imG, 0.0, kTwoPi, 4096, 1e-13);
  DistinguishedPoints dp;
  dp.pole_index = pole_index;
  dp.radius = radius;
  for (double th : roots) {
    if (G(th).real() >= 0.0) continue;  // vertical tangency
    double thn = std::fmod(th + kTwoPi, kTwoPi);
    bool dup = false;
    for (double have : dp.angles)
      if (std::abs(have - thn) < 1e-9 || std::abs(std::abs(have - thn) - kTwoPi) < 1e-9)
        dup = true;
    if (!dup) dp.angles.push_back(thn);
  }
  std::sort(dp.angles.begin(), dp.angles.end());
  if (static_cast<int>(dp.angles.size()) != n - 2)
    throw domain_error("tangency count != n-2 (radius too large or root-finding failure)");

  for (size_t k = 0; k < dp.angles.size(); ++k) {
    double a = dp.angles[k];
    double b = (k + 1 < dp.angles.size()) ? dp.angles[k + 1] : dp.angles[0] + kTwoPi;
    dp.arc_measures.push_back(
        transverse_measure_fn(qloc, Arc::circle(0.0, radius, a, b), tol));
  }
  return dp;
}

// ---------------------------------------------------------------------------
// Strip decomposition
// ---------------------------------------------------------------------------

namespace detail {

std::vector<double> prong_angles(Complex c, int order, bool vertical) {
  std::vector<double> out;
  double base = vertical ? kPi : 0.0;
  for (int k = 0; k < order + 2; ++k) {
    double th = (2.0 * kPi * k + base - std::arg(c)) / (order + 2);
    th = std::fmod(th + 2.0 * kTwoPi, kTwoPi);
    out.push_back(th);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Box {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  void add(Complex p) {
    x0 = std::min(x0, p.real());
    x1 = std::max(x1, p.real());
    y0 = std::min(y0, p.imag());
    y1 = std::max(y1, p.imag());
  }
  bool overlaps(const Box& o) const {
    return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
  }
};

bool segment_intersect(Complex p1, Complex p2, Complex q1, Complex q2, double& s,
                       double& t) {
  Complex d1 = p2 - p1, d2 = q2 - q1;
  double den = cross(d1, d2);
  if (std::abs(den) < 1e-300) return false;
  Complex r = q1 - p1;
  s = cross(r, d2) / den;
  t = cross(r, d1) / den;
  const double eps = 1e-12;
  return s >= -eps && s <= 1 + eps && t >= -eps && t <= 1 + eps;
}

}  // namespace

std::optional<Crossing> first_crossing(const std::vector<Complex>& path,
                                       const std::vector<Complex>& target) {
  if (path.size() < 2 || target.size() < 2) return std::nullopt;
  constexpr size_t kChunk = 64;
  std::vector<Box> chunk_boxes;
  for (size_t b = 0; b + 1 < target.size(); b += kChunk) {
    Box box;
    for (size_t i = b; i < std::min(target.size(), b + kChunk + 1); ++i) box.add(target[i]);
    chunk_boxes.push_back(box);
  }
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    Box seg_box;
    seg_box.add(path[i]);
    seg_box.add(path[i + 1]);
    for (size_t cb = 0; cb < chunk_boxes.size(); ++cb) {
      if (!seg_box.overlaps(chunk_boxes[cb])) continue;
      size_t begin = cb * kChunk;
      size_t end = std::min(target.size() - 1, begin + kChunk);
      for (size_t j = begin; j < end; ++j) {
        double s, t;
        if (segment_intersect(path[i], path[i + 1], target[j], target[j + 1], s, t)) {
          Crossing c;
          c.path_seg = i;
          c.target_seg = j;
          c.path_t = s;
          c.point = path[i] + s * (path[i + 1] - path[i]);
          return c;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

namespace {

// Integral of tracked sqrt(q) from a trajectory sample to an interior point X
// of the following segment, continuing the trajectory's stored branch.
Complex w_at_point(const std::function<Complex(Complex)>& q, const Trajectory& traj,
                   size_t seg, Complex X, Complex* branch_out) {
  Complex ref = traj.sqrt_q[seg];
  Complex w = traj.w_integral[seg] + integrate_segment_tracked(q, traj.points[seg], X, ref);
  if (branch_out) *branch_out = ref;
  return w;
}

struct StripCandidate {
  int zero_a, zero_b;
  Complex period;  // Im > 0
  std::vector<Complex> arc;
};

}  // namespace

FoliationSkeleton strip_decomposition_allow_saddles(const QuadraticDifferential& q,
                                                    const TraceLimits& limits) {
  if (!q.is_rational())
    throw domain_error("strip decomposition is defined for rational differentials");
  FoliationSkeleton sk;
  for (size_t pi = 0; pi < q.poles().size(); ++pi)
    for (int s = 0; s < q.poles()[pi].order - 2; ++s)
      sk.half_planes.push_back({static_cast<int>(pi), s});
  if (q.zeros().empty()) return sk;
  for (const auto& z : q.zeros())
    if (z.order != 1) throw domain_error("strip decomposition requires simple zeros");

  auto qfun = [&q](Complex z) { return q.eval(z); };
  const int nz = static_cast<int>(q.zeros().size());
  const double prox = limits.zero_prox_flat;

  struct Launch {
    int zero;
    int prong;
    double angle;
    LeafKind kind;
  };
  std::vector<Launch> launches;
  std::vector<Complex> coeffs(nz);
  std::vector<double> launch_radius(nz);
  for (int i = 0; i < nz; ++i) {
    Complex z0 = q.zeros()[i].location;
    coeffs[i] = q_derivative(q, z0);
    launch_radius[i] = flat_to_euclid(4.0 * prox, 1, std::abs(coeffs[i]));
    auto h = detail::prong_angles(coeffs[i], 1, false);
    auto v = detail::prong_angles(coeffs[i], 1, true);
    for (int k = 0; k < 3; ++k) launches.push_back({i, k, h[k], LeafKind::horizontal});
    for (int k = 0; k < 3; ++k) launches.push_back({i, k, v[k], LeafKind::vertical});
  }

  std::vector<Trajectory> traced(launches.size());
  parallel_for(static_cast<int>(launches.size()), [&](int li) {
    const Launch& L = launches[li];
    Complex z0 = q.zeros()[L.zero].location;
    Complex dir = std::exp(Complex(0, L.angle));
    Complex start = z0 + launch_radius[L.zero] * dir;
    traced[li] = trace_trajectory(q, start, L.kind, 1, limits, dir);
  });

  // Separatrices and saddle-connection scan.
  std::vector<size_t> sep_index;  // into launches/traced
  for (size_t li = 0; li < launches.size(); ++li) {
    if (launches[li].kind != LeafKind::horizontal) continue;
    const Trajectory& t = traced[li];
    sk.separatrices.push_back({launches[li].zero, launches[li].prong, t});
    sep_index.push_back(li);
    if (t.termination.kind == Termination::Kind::hit_zero)
      sk.saddle_connections.push_back({launches[li].zero, t.termination.ref});
    else if (t.termination.kind == Termination::Kind::max_length)
      throw domain_error("separatrix exceeded the length cap without escaping to a pole");
  }
  if (!sk.saddle_connections.empty()) return sk;

  // Vertical leaves pair the strip boundaries.
  std::vector<StripCandidate> candidates;
  for (size_t li = 0; li < launches.size(); ++li) {
    if (launches[li].kind != LeafKind::vertical) continue;
    const Launch& L = launches[li];
    const Trajectory& V = traced[li];
    const Complex za = q.zeros()[L.zero].location;

    if (V.termination.kind == Termination::Kind::hit_zero) {
      int b = V.termination.ref;
      Complex zb = q.zeros()[b].location;
      Complex ref0 = V.sqrt_q[0];
      Complex piece1 = -integrate_segment_tracked(qfun, V.points[0], za, ref0);
      Complex refe = V.sqrt_q.back();
      Complex piece4 = integrate_segment_tracked(qfun, V.points.back(), zb, refe);
      Complex period = piece1 + V.w_integral.back() + piece4;
      if (period.imag() < 0) period = -period;
      StripCandidate c{L.zero, b, period, {}};
      c.arc.push_back(za);
      c.arc.insert(c.arc.end(), V.points.begin(), V.points.end());
      c.arc.push_back(zb);
      candidates.push_back(std::move(c));
      continue;
    }
    if (V.termination.kind != Termination::Kind::escaped_to_pole) continue;

    // First crossing with any separatrix identifies the opposite boundary.
    std::optional<detail::Crossing> best;
    size_t best_sep = 0;
    for (size_t s : sep_index) {
      auto c = detail::first_crossing(V.points, traced[s].points);
      if (c && (!best || c->path_seg < best->path_seg ||
                (c->path_seg == best->path_seg && c->path_t < best->path_t))) {
        best = c;
        best_sep = s;
      }
    }
    if (!best) continue;  // the prong opens into a half-plane

    const Trajectory& S = traced[best_sep];
    const int b = launches[best_sep].zero;
    const Complex zb = q.zeros()[b].location;
    const Complex X = best->point;

    Complex sV, sS;
    Complex wV = w_at_point(qfun, V, best->path_seg, X, &sV);
    Complex wS = w_at_point(qfun, S, best->target_seg, X, &sS);
    double sigma = (sV * std::conj(sS)).real() >= 0 ? 1.0 : -1.0;

    Complex ref0 = V.sqrt_q[0];
    Complex piece1 = -integrate_segment_tracked(qfun, V.points[0], za, ref0);
    Complex refs = S.sqrt_q[0];
    Complex piece4 = integrate_segment_tracked(qfun, S.points[0], zb, refs);
    Complex period = piece1 + wV - sigma * wS + sigma * piece4;
    if (period.imag() < 0) period = -period;

    StripCandidate c{L.zero, b, period, {}};
    c.arc.push_back(za);
    c.arc.insert(c.arc.end(), V.points.begin(), V.points.begin() + best->path_seg + 1);
    c.arc.push_back(X);
    for (size_t j = best->target_seg + 1; j-- > 0;) c.arc.push_back(S.points[j]);
    c.arc.push_back(zb);
    candidates.push_back(std::move(c));
  }

  // Each strip is discovered once from each side; merge by zero pair and
  // period agreement.
  for (auto& c : candidates) {
    bool merged = false;
    for (auto& s : sk.strips) {
      bool same_pair = (s.zero_a == c.zero_a && s.zero_b == c.zero_b) ||
                       (s.zero_a == c.zero_b && s.zero_b == c.zero_a);
      if (same_pair && std::abs(s.period - c.period) < 1e-6 * (1.0 + std::abs(s.period))) {
        s.width_check = c.period.imag();
        merged = true;
        break;
      }
    }
    if (!merged) {
      Strip s;
      s.zero_a = c.zero_a;
      s.zero_b = c.zero_b;
      s.period = c.period;
      s.width = c.period.imag();
      s.width_check = s.width;
      s.arc = std::move(c.arc);
      sk.strips.push_back(std::move(s));
    }
  }
  return sk;
}

FoliationSkeleton strip_decomposition(const QuadraticDifferential& q,
                                      const TraceLimits& limits) {
  FoliationSkeleton sk = strip_decomposition_allow_saddles(q, limits);
  if (!sk.saddle_connections.empty()) {
    const auto& sc = sk.saddle_connections.front();
    throw domain_error("non-generic: saddle connection between zeros #" +
                       std::to_string(sc.zero_a) + " and #" + std::to_string(sc.zero_b));
  }
  return sk;
}

double collapsing_value(Complex a, Complex w) {
  if (w == Complex(0)) throw domain_error("collapsing value undefined at w = 0");
  return (1.0 / (w * w) + a / w).imag();
}

}  // namespace folia
