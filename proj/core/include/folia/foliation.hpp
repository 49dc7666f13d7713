#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "folia/qdiff.hpp"
#include "folia/types.hpp"

namespace folia {

enum class LeafKind { horizontal, vertical };

struct Termination {
  enum class Kind { escaped_to_pole, hit_zero, max_length, closed };
  Kind kind = Kind::max_length;
  int ref = -1;  // pole index (escaped) or zero index (hit)
};

/// Polyline approximation of a leaf of the horizontal or vertical foliation,
/// in the natural parameter (unit flat speed).
struct Trajectory {
  std::vector<Complex> points;
  std::vector<double> flat_param;   // cumulative flat length at each sample
  std::vector<Complex> sqrt_q;      // tracked branch of sqrt(q) at each sample
  std::vector<Complex> w_integral;  // cumulative integral of sqrt(q) dz
  LeafKind kind = LeafKind::horizontal;
  int orientation = 1;
  Termination termination;
  double invariant_drift = 0.0;  // |Im W| (horizontal) or |Re W| (vertical) at the end

  double flat_length() const { return flat_param.empty() ? 0.0 : flat_param.back(); }
};

struct TraceLimits {
  double max_flat_length = 300.0;
  int max_steps = 400000;
  double rel_tol = 1e-10;
  double escape_factor = 10.0;   // chart-radius multiple of the zero scale
  double zero_prox_flat = 1e-5;  // flat distance to a zero that counts as a hit
  int monotone_window = 100;     // consecutive monotone steps before declaring escape
};

/// Integrates dz/dt = orientation * e^{i alpha} / sqrt(q) (alpha = 0
/// horizontal, pi/2 vertical) with an adaptive 5th/4th embedded pair and
/// continuous branch tracking.  The branch at the start is chosen so the
/// initial motion aligns with direction_hint when one is given.
Trajectory trace_trajectory(const QuadraticDifferential& q, Complex start, LeafKind kind,
                            int orientation = 1, const TraceLimits& limits = {},
                            std::optional<Complex> direction_hint = std::nullopt);

/// Smooth parametrized curve with an explicit derivative.
struct Arc {
  std::function<Complex(double)> gamma;
  std::function<Complex(double)> dgamma;
  double t0 = 0.0;
  double t1 = 1.0;

  static Arc segment(Complex a, Complex b);
  static Arc circle(Complex center, double radius, double theta0, double theta1);
};

/// Transverse measure int |Im(sqrt(q) gamma')| dt, split into panels at the
/// sign changes of the tracked integrand so every panel is smooth.
double transverse_measure(const QuadraticDifferential& q, const Arc& arc,
                          double tol = 1e-9);

/// Same measure against an arbitrary chart expression for q.
double transverse_measure_fn(const std::function<Complex(Complex)>& q, const Arc& arc,
                             double tol = 1e-9);

struct MeasurePanels {
  std::vector<double> boundaries;  // t0 < s_1 < ... < t1
  std::vector<double> values;      // per-panel |integral|
  std::vector<int> signs;          // sign of the tracked integrand on the panel
  double total() const;
  double signed_total() const;  // equals the loop integral of Im sqrt(q) dz
};

MeasurePanels transverse_measure_panels(const std::function<Complex(Complex)>& q,
                                        const Arc& arc, double tol = 1e-9);

/// Tangency points of the horizontal foliation with the circle |u| = radius
/// in the canonical chart at the pole, plus the measures of the arcs between
/// consecutive points.
struct DistinguishedPoints {
  int pole_index = 0;
  double radius = 0.0;
  std::vector<double> angles;        // sorted, in [0, 2 pi); exactly n-2 of them
  std::vector<double> arc_measures;  // arc k runs from angles[k] to angles[k+1]

  /// Alternating sum with the first arc taken positive.
  double alternating_sum() const;
};

DistinguishedPoints distinguished_points(const QuadraticDifferential& q, int pole_index,
                                         double radius, double tol = 1e-9);

struct Separatrix {
  int zero_index = 0;
  int prong = 0;  // 0 .. m+1 around the zero
  Trajectory traj;
};

struct Strip {
  int zero_a = 0, zero_b = 0;
  Complex period;  // normalized so Im > 0
  double width = 0.0;
  double width_check = 0.0;    // width from the opposite-side discovery
  std::vector<Complex> arc;    // transverse polyline zero_a -> zero_b
};

struct HalfPlane {
  int pole_index = 0;
  int sector = 0;
};

struct SaddleConnection {
  int zero_a = 0, zero_b = 0;
};

struct FoliationSkeleton {
  std::vector<Separatrix> separatrices;
  std::vector<HalfPlane> half_planes;
  std::vector<Strip> strips;
  std::vector<SaddleConnection> saddle_connections;  // empty for generic input
};

/// Full horizontal decomposition of a rational differential with simple
/// zeros: separatrices, half-plane count, and strips with complex periods.
/// Throws if a horizontal saddle connection is detected (non-generic input).
FoliationSkeleton strip_decomposition(const QuadraticDifferential& q,
                                      const TraceLimits& limits = {});

/// Non-throwing variant: saddle connections are reported in the skeleton.
FoliationSkeleton strip_decomposition_allow_saddles(const QuadraticDifferential& q,
                                                    const TraceLimits& limits = {});

/// Local collapsing function Im(1/w^2 + a/w) of the order-4 quotient model.
double collapsing_value(Complex a, Complex w);

namespace detail {

struct Crossing {
  size_t path_seg = 0;
  size_t target_seg = 0;
  double path_t = 0.0;  // parameter within the path segment
  Complex point;
};

/// First intersection of `path` with `target`, walking `path` in order.
std::optional<Crossing> first_crossing(const std::vector<Complex>& path,
                                       const std::vector<Complex>& target);

/// Horizontal (k = 0, .., m+1) or vertical ray directions at a zero of order
/// m with local coefficient c.
std::vector<double> prong_angles(Complex c, int order, bool vertical);

}  // namespace detail

}  // namespace folia
