#pragma once

#include <string>
#include <vector>

#include "folia/foliation.hpp"
#include "folia/qdiff.hpp"

namespace folia::svg {

/// Deterministic SVG scene: fixed palette, fixed float formatting, legend
/// and a unit scale bar.  Coordinates are z-plane values.
class Scene {
 public:
  Scene(double half_extent, int pixels);

  void polyline(const std::vector<Complex>& pts, const std::string& color, double width,
                double opacity = 1.0);
  void polygon(const std::vector<Complex>& pts, const std::string& fill, double opacity);
  void circle(Complex center, double radius_px, const std::string& color);
  void legend_entry(const std::string& color, const std::string& label);
  std::string render() const;

  double half_extent() const { return half_extent_; }

 private:
  std::string map_point(Complex z) const;
  double half_extent_;
  int pixels_;
  std::vector<std::string> body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

/// Separatrices, shaded sectors between consecutive escaping separatrices
/// (half-planes; strip ends show as slivers), and bold strip crossing arcs.
std::string render_decomposition(const QuadraticDifferential& q,
                                 const FoliationSkeleton& sk);

std::string render_trajectories(const QuadraticDifferential& q,
                                const std::vector<Trajectory>& trajectories);

}  // namespace folia::svg
