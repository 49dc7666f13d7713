#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace folia::svg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const char* kSectorPalette[] = {"#9ecae1", "#a1d99b", "#fdae6b", "#bcbddc",
                                "#fdd0a2", "#c7e9c0", "#9e9ac8", "#74c476"};

}  // namespace

Scene::Scene(double half_extent, int pixels) : half_extent_(half_extent), pixels_(pixels) {}

std::string Scene::map_point(Complex z) const {
  double s = pixels_ / (2.0 * half_extent_);
  double x = (z.real() + half_extent_) * s;
  double y = (half_extent_ - z.imag()) * s;
  return fmt(x) + "," + fmt(y);
}

void Scene::polyline(const std::vector<Complex>& pts, const std::string& color,
                     double width, double opacity) {
  if (pts.size() < 2) return;
  std::string d = "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                  fmt(width) + "\" stroke-opacity=\"" + fmt(opacity) + "\" points=\"";
  for (const auto& p : pts) {
    d += map_point(p);
    d += ' ';
  }
  d += "\"/>";
  body_.push_back(std::move(d));
}

void Scene::polygon(const std::vector<Complex>& pts, const std::string& fill,
                    double opacity) {
  if (pts.size() < 3) return;
  std::string d = "<polygon fill=\"" + fill + "\" fill-opacity=\"" + fmt(opacity) +
                  "\" stroke=\"none\" points=\"";
  for (const auto& p : pts) {
    d += map_point(p);
    d += ' ';
  }
  d += "\"/>";
  body_.push_back(std::move(d));
}

void Scene::circle(Complex center, double radius_px, const std::string& color) {
  auto xy = map_point(center);
  auto comma = xy.find(',');
  body_.push_back("<circle cx=\"" + xy.substr(0, comma) + "\" cy=\"" +
                  xy.substr(comma + 1) + "\" r=\"" + fmt(radius_px) + "\" fill=\"" + color +
                  "\"/>");
}

void Scene::legend_entry(const std::string& color, const std::string& label) {
  legend_.emplace_back(color, label);
}

std::string Scene::render() const {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(pixels_) + "\" height=\"" + std::to_string(pixels_) +
                    "\" viewBox=\"0 0 " + std::to_string(pixels_) + " " +
                    std::to_string(pixels_) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : body_) {
    out += b;
    out += '\n';
  }
  // legend, top right
  double lx = pixels_ - 180.0, ly = 20.0;
  for (const auto& [color, label] : legend_) {
    out += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(ly - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>";
    out += "<text x=\"" + fmt(lx + 18) + "\" y=\"" + fmt(ly) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" + label + "</text>\n";
    ly += 18.0;
  }
  // scale bar: one z-plane unit, bottom left
  double s = pixels_ / (2.0 * half_extent_);
  double y = pixels_ - 24.0;
  out += "<line x1=\"20\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(20 + s) + "\" y2=\"" + fmt(y) +
         "\" stroke=\"black\" stroke-width=\"2\"/>";
  out += "<text x=\"" + fmt(20 + 0.5 * s) + "\" y=\"" + fmt(y - 6) +
         "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">1</text>\n";
  out += "</svg>\n";
  return out;
}

namespace {

// Clip a polyline at |z| = R; returns the prefix ending on the circle.
std::vector<Complex> clip_to_disk(const std::vector<Complex>& pts, double R) {
  std::vector<Complex> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (std::abs(pts[i]) <= R) {
      out.push_back(pts[i]);
      continue;
    }
    if (i == 0) break;
    // interpolate onto the circle
    Complex a = pts[i - 1], b = pts[i];
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi);
      (std::abs(a + mid * (b - a)) <= R ? lo : hi) = mid;
    }
    out.push_back(a + lo * (b - a));
    break;
  }
  return out;
}

}  // namespace

std::string render_decomposition(const QuadraticDifferential& q,
                                 const FoliationSkeleton& sk) {
  const double R = 3.0 * q.zero_scale();
  Scene scene(1.1 * R, 720);

  // Sectors between consecutive escaping separatrices, ordered by exit angle.
  struct Exit {
    size_t sep;
    double angle;
    std::vector<Complex> clipped;
  };
  std::vector<Exit> exits;
  for (size_t i = 0; i < sk.separatrices.size(); ++i) {
    auto clipped = clip_to_disk(sk.separatrices[i].traj.points, R);
    if (clipped.size() < 2 || std::abs(clipped.back()) < 0.99 * R) continue;
    exits.push_back({i, std::arg(clipped.back()), std::move(clipped)});
  }
  std::sort(exits.begin(), exits.end(),
            [](const Exit& a, const Exit& b) { return a.angle < b.angle; });
  for (size_t k = 0; k < exits.size(); ++k) {
    const Exit& a = exits[k];
    const Exit& b = exits[(k + 1) % exits.size()];
    std::vector<Complex> poly;
    Complex za = q.zeros()[sk.separatrices[a.sep].zero_index].location;
    Complex zb = q.zeros()[sk.separatrices[b.sep].zero_index].location;
    poly.push_back(za);
    poly.insert(poly.end(), a.clipped.begin(), a.clipped.end());
    double a0 = a.angle, a1 = b.angle;
    if (a1 <= a0) a1 += kTwoPi;
    for (int s = 1; s < 24; ++s)
      poly.push_back(R * std::exp(Complex(0, a0 + (a1 - a0) * s / 24.0)));
    poly.insert(poly.end(), b.clipped.rbegin(), b.clipped.rend());
    poly.push_back(zb);
    scene.polygon(poly, kSectorPalette[k % 8], 0.35);
  }

  for (const auto& sep : sk.separatrices)
    scene.polyline(clip_to_disk(sep.traj.points, R), "#333333", 1.5);
  for (const auto& strip : sk.strips)
    scene.polyline(clip_to_disk(strip.arc, R), "#d62728", 3.0, 0.9);
  for (const auto& z : q.zeros()) scene.circle(z.location, 4.0, "#000000");

  scene.legend_entry("#9ecae1", "half-plane sectors");
  scene.legend_entry("#d62728", "strip crossing arcs");
  scene.legend_entry("#333333", "separatrices");
  return scene.render();
}

std::string render_trajectories(const QuadraticDifferential& q,
                                const std::vector<Trajectory>& trajectories) {
  double R = 3.0 * q.zero_scale();
  for (const auto& t : trajectories)
    for (const auto& p : t.points) R = std::max(R, std::abs(p));
  Scene scene(1.1 * R, 720);
  for (size_t i = 0; i < trajectories.size(); ++i) {
    const char* color = trajectories[i].kind == LeafKind::horizontal ? "#1f77b4" : "#2ca02c";
    scene.polyline(clip_to_disk(trajectories[i].points, R), color, 1.5);
    if (!trajectories[i].points.empty())
      scene.circle(trajectories[i].points.front(), 3.0, "#d62728");
  }
  for (const auto& z : q.zeros()) scene.circle(z.location, 4.0, "#000000");
  scene.legend_entry("#1f77b4", "horizontal leaves");
  scene.legend_entry("#2ca02c", "vertical leaves");
  scene.legend_entry("#d62728", "start points");
  return scene.render();
}

}  // namespace folia::svg
