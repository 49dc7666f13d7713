#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "folia/jsonfmt.hpp"
#include "folia/types.hpp"

namespace folia {

/// Finite metric tree with labeled infinite rays.  Zero-length edges are
/// contracted on construction, so stored lengths are strictly positive.
struct MetricTree {
  struct Edge {
    int u, v;
    double length;
  };
  struct Ray {
    int vertex;
    int label;
  };

  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<Ray> rays;
  std::optional<int> basepoint;

  // gluing marks
  std::vector<int> marked_axis;            // vertex path q- .. q+
  std::optional<double> boundary_measure;  // transverse measure of the boundary
  std::optional<int> marked_point;         // zero-measure attachment point
  std::optional<int> z_orbit_vertex;       // junction carrying the symbolic Z-family

  /// Contracts zero-length edges, validates connectivity and acyclicity.
  /// vertex_map (when given) receives the old-to-new vertex relabeling.
  static MetricTree build(int vertex_count, std::vector<Edge> edges, std::vector<Ray> rays,
                          std::vector<int>* vertex_map = nullptr);

  bool is_tree() const;
  int degree(int v) const;  // finite edges plus rays
  double total_edge_length() const;
  std::vector<int> path(int u, int v) const;  // vertex path, empty if none
  double path_length(int u, int v) const;
};

/// Planar trivalent expansion of a single vertex with `leaf_count` cyclically
/// labeled edges, encoded as a triangulation of the polygon whose sides are
/// the leaves: internal edges correspond to diagonals.
struct ExpansionType {
  int leaf_count = 0;
  std::vector<std::pair<int, int>> diagonals;   // lexicographically sorted
  std::vector<std::array<int, 3>> triangles;

  int parameter_count() const { return leaf_count - 3; }
  /// Leaf interval [first, last] (inclusive) split off by each diagonal.
  std::vector<std::pair<int, int>> leaf_intervals() const;
};

/// All planar trivalent expansions of a valence-V vertex in deterministic
/// order; the count is the Catalan number C_{V-2}.
std::vector<ExpansionType> enumerate_expansions(int valence);

/// Index (in `all`) of the type obtained by collapsing diagonal k of `t` and
/// re-expanding the resulting quadrilateral the other way.
int whitehead_neighbor(const ExpansionType& t, int diagonal_index,
                       const std::vector<ExpansionType>& all);

enum class LeafSpaceCase { positive_measure, zero_measure };

/// Fundamental domain of the Z-action on the leaf space of a model foliation
/// at a pole of order n: n-2 labeled rays plus finite edges.
struct PoleLeafSpace {
  int pole_order = 0;
  LeafSpaceCase kind = LeafSpaceCase::positive_measure;
  MetricTree domain;
  double translation_length = 0.0;
  std::vector<int> axis;       // q- .. q+ path (positive case)
  std::optional<int> root;     // zero case
  std::vector<double> strip_widths;
  int parameter_count = 0;     // free lengths + the boundary measure
};

/// Case I (positive boundary measure): the translation length is
/// a_first + (path between the two axis-adjacent leaves) + a_last.
PoleLeafSpace build_pole_leafspace_positive(int n, const ExpansionType& expansion,
                                            const std::vector<double>& internal_lengths,
                                            double a_first, double a_last);

/// Case II (zero boundary measure): rooted domain from an expansion on n-1
/// leaves, leaf 0 being the root stem.  A negative root width reattaches the
/// stem at the other adjacent labeled direction and stores |width|.
PoleLeafSpace build_pole_leafspace_zero(int n, const ExpansionType& expansion,
                                        const std::vector<double>& internal_lengths,
                                        double root_width);

/// Dispatcher: positive boundary_measure selects Case I and validates it
/// against the supplied lengths.
PoleLeafSpace build_pole_leafspace(int n, double boundary_measure,
                                   const ExpansionType& expansion,
                                   const std::vector<double>& internal_lengths,
                                   double a_first, double a_last);

/// Equivariant identification of the leaf spaces along the boundary: the
/// marked axis (or point) of t0 is identified with the axis (or root) of tu.
MetricTree glue_trees(const MetricTree& t0, const PoleLeafSpace& tu);

struct MfDimension {
  int chi = 0;                          // 6g - 6 + sum(n_i + 1)
  int boundary_surface_dim = 0;         // 6g - 6 + 3k
  std::vector<int> pointed_pole_dims;   // n_i - 1
  bool outside_stated_range = false;    // reported for g < 2
  bool consistency_ok = false;          // boundary + poles - shared measures == chi
};

MfDimension mf_dimension(int genus, const std::vector<int>& pole_orders);

JsonValue tree_to_json(const MetricTree& t);
std::string tree_to_dot(const MetricTree& t);

}  // namespace folia
