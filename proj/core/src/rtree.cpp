#include "folia/rtree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace folia {

// ---------------------------------------------------------------------------
// MetricTree
// ---------------------------------------------------------------------------

MetricTree MetricTree::build(int vertex_count, std::vector<Edge> edges,
                             std::vector<Ray> rays, std::vector<int>* vertex_map) {
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= vertex_count || e.v < 0 || e.v >= vertex_count)
      throw domain_error("metric tree: edge endpoint out of range");
    if (e.length < 0) throw domain_error("negative measure: edge lengths must be >= 0");
  }
  // contract zero-length edges via union-find
  std::vector<int> parent(vertex_count);
  for (int i = 0; i < vertex_count; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges)
    if (e.length == 0.0) parent[find(e.u)] = find(e.v);

  std::vector<int> remap(vertex_count, -1);
  int next = 0;
  for (int i = 0; i < vertex_count; ++i) {
    int r = find(i);
    if (remap[r] < 0) remap[r] = next++;
  }
  for (int i = 0; i < vertex_count; ++i) remap[i] = remap[find(i)];
  if (vertex_map) *vertex_map = remap;

  MetricTree t;
  t.vertex_count = next;
  for (const auto& e : edges)
    if (e.length > 0.0) t.edges.push_back({remap[e.u], remap[e.v], e.length});
  for (const auto& r : rays) t.rays.push_back({remap[r.vertex], r.label});

  std::vector<int> seen;
  for (const auto& r : t.rays) {
    if (std::find(seen.begin(), seen.end(), r.label) != seen.end())
      throw domain_error("metric tree: repeated ray label");
    seen.push_back(r.label);
  }
  if (!t.is_tree()) throw domain_error("metric tree: edges do not form a tree");
  return t;
}

bool MetricTree::is_tree() const {
  if (vertex_count == 0) return false;
  if (static_cast<int>(edges.size()) != vertex_count - 1) return false;
  std::vector<std::vector<int>> adj(vertex_count);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> vis(vertex_count, false);
  std::queue<int> bfs;
  bfs.push(0);
  vis[0] = true;
  int count = 1;
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int w : adj[v])
      if (!vis[w]) {
        vis[w] = true;
        ++count;
        bfs.push(w);
      }
  }
  return count == vertex_count;
}

int MetricTree::degree(int v) const {
  int d = 0;
  for (const auto& e : edges) d += (e.u == v) + (e.v == v);
  for (const auto& r : rays) d += (r.vertex == v);
  return d;
}

double MetricTree::total_edge_length() const {
  double s = 0.0;
  for (const auto& e : edges) s += e.length;
  return s;
}

std::vector<int> MetricTree::path(int u, int v) const {
  std::vector<std::vector<std::pair<int, int>>> adj(vertex_count);  // (next, edge idx)
  for (size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({edges[i].v, static_cast<int>(i)});
    adj[edges[i].v].push_back({edges[i].u, static_cast<int>(i)});
  }
  std::vector<int> prev(vertex_count, -1);
  std::vector<bool> vis(vertex_count, false);
  std::queue<int> bfs;
  bfs.push(u);
  vis[u] = true;
  while (!bfs.empty()) {
    int x = bfs.front();
    bfs.pop();
    if (x == v) break;
    for (auto [y, ei] : adj[x])
      if (!vis[y]) {
        vis[y] = true;
        prev[y] = x;
        bfs.push(y);
      }
  }
  if (!vis[v]) return {};
  std::vector<int> out;
  for (int x = v; x != -1; x = prev[x]) out.push_back(x);
  std::reverse(out.begin(), out.end());
  return out;
}

double MetricTree::path_length(int u, int v) const {
  auto p = path(u, v);
  if (p.empty()) return std::numeric_limits<double>::infinity();
  double len = 0.0;
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    for (const auto& e : edges)
      if ((e.u == p[i] && e.v == p[i + 1]) || (e.v == p[i] && e.u == p[i + 1])) {
        len += e.length;
        break;
      }
  }
  return len;
}

// ---------------------------------------------------------------------------
// Expansions
// ---------------------------------------------------------------------------

namespace {

// Recursive triangulation enumeration of the polygon with vertices lo..hi.
void triangulate(int lo, int hi, std::vector<std::array<int, 3>>& current,
                 std::vector<std::vector<std::array<int, 3>>>& out) {
  if (hi - lo < 2) {
    out.push_back(current);
    return;
  }
  for (int k = lo + 1; k < hi; ++k) {
    current.push_back({lo, k, hi});
    // the recursion splits into [lo..k] and [k..hi]
    size_t mark = out.size();
    std::vector<std::array<int, 3>> saved = current;
    std::vector<std::vector<std::array<int, 3>>> left;
    triangulate(lo, k, current, left);
    (void)mark;
    std::vector<std::vector<std::array<int, 3>>> full;
    for (auto& l : left) {
      std::vector<std::array<int, 3>> cur2 = l;
      std::vector<std::vector<std::array<int, 3>>> right;
      triangulate(k, hi, cur2, right);
      for (auto& r : right) full.push_back(r);
    }
    for (auto& f : full) out.push_back(f);
    current = saved;
    current.pop_back();
  }
}

bool is_polygon_side(int a, int b, int V) {
  int d = std::abs(a - b);
  return d == 1 || d == V - 1;
}

}  // namespace

std::vector<ExpansionType> enumerate_expansions(int valence) {
  if (valence < 3) throw domain_error("enumerate_expansions requires valence >= 3");
  std::vector<std::vector<std::array<int, 3>>> tris;
  std::vector<std::array<int, 3>> cur;
  triangulate(0, valence - 1, cur, tris);

  std::vector<ExpansionType> out;
  for (auto& t : tris) {
    ExpansionType e;
    e.leaf_count = valence;
    e.triangles = t;
    for (const auto& tri : t) {
      const int idx[3][2] = {{tri[0], tri[1]}, {tri[1], tri[2]}, {tri[0], tri[2]}};
      for (const auto& pr : idx) {
        if (is_polygon_side(pr[0], pr[1], valence)) continue;
        std::pair<int, int> d{std::min(pr[0], pr[1]), std::max(pr[0], pr[1])};
        if (std::find(e.diagonals.begin(), e.diagonals.end(), d) == e.diagonals.end())
          e.diagonals.push_back(d);
      }
    }
    std::sort(e.diagonals.begin(), e.diagonals.end());
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const ExpansionType& a, const ExpansionType& b) {
    return a.diagonals < b.diagonals;
  });
  return out;
}

std::vector<std::pair<int, int>> ExpansionType::leaf_intervals() const {
  // Diagonal (a, b) splits off side-leaves a .. b-1.
  std::vector<std::pair<int, int>> out;
  for (const auto& d : diagonals) out.push_back({d.first, d.second - 1});
  return out;
}

int whitehead_neighbor(const ExpansionType& t, int diagonal_index,
                       const std::vector<ExpansionType>& all) {
  if (diagonal_index < 0 || diagonal_index >= static_cast<int>(t.diagonals.size()))
    throw domain_error("whitehead_neighbor: diagonal index out of range");
  auto d = t.diagonals[diagonal_index];
  // the two triangles sharing d form a quadrilateral (d.first, x, d.second, y)
  std::vector<int> opposite;
  for (const auto& tri : t.triangles) {
    bool has_a = tri[0] == d.first || tri[1] == d.first || tri[2] == d.first;
    bool has_b = tri[0] == d.second || tri[1] == d.second || tri[2] == d.second;
    if (has_a && has_b)
      for (int v : tri)
        if (v != d.first && v != d.second) opposite.push_back(v);
  }
  if (opposite.size() != 2) throw domain_error("whitehead_neighbor: malformed triangulation");
  std::pair<int, int> flipped{std::min(opposite[0], opposite[1]),
                              std::max(opposite[0], opposite[1])};
  std::vector<std::pair<int, int>> target = t.diagonals;
  target[diagonal_index] = flipped;
  std::sort(target.begin(), target.end());
  for (size_t i = 0; i < all.size(); ++i)
    if (all[i].diagonals == target) return static_cast<int>(i);
  throw domain_error("whitehead_neighbor: flipped type not found");
}

// ---------------------------------------------------------------------------
// Pole leaf spaces
// ---------------------------------------------------------------------------

namespace {

// Dual tree of a triangulation: one vertex per triangle, internal edges
// across diagonals (lengths in diagonal-sorted order), and the attachment
// triangle of every polygon side.
struct DualTree {
  int vertex_count = 0;
  std::vector<MetricTree::Edge> edges;
  std::vector<int> side_vertex;  // attachment vertex per leaf
};

DualTree dual_tree(const ExpansionType& e, const std::vector<double>& internal_lengths) {
  const int V = e.leaf_count;
  if (static_cast<int>(internal_lengths.size()) != static_cast<int>(e.diagonals.size()))
    throw domain_error("inconsistent lengths: expected one length per internal edge");
  DualTree d;
  if (V == 2) {  // degenerate two-leaf case: a single vertex carries both leaves
    d.vertex_count = 1;
    d.side_vertex = {0, 0};
    return d;
  }
  d.vertex_count = static_cast<int>(e.triangles.size());
  auto tri_has = [](const std::array<int, 3>& t, int a, int b) {
    bool ha = t[0] == a || t[1] == a || t[2] == a;
    bool hb = t[0] == b || t[1] == b || t[2] == b;
    return ha && hb;
  };
  for (size_t k = 0; k < e.diagonals.size(); ++k) {
    auto [a, b] = e.diagonals[k];
    std::vector<int> touching;
    for (size_t ti = 0; ti < e.triangles.size(); ++ti)
      if (tri_has(e.triangles[ti], a, b)) touching.push_back(static_cast<int>(ti));
    if (touching.size() != 2) throw domain_error("inconsistent lengths: malformed expansion");
    if (internal_lengths[k] < 0) throw domain_error("negative measure: lengths must be >= 0");
    d.edges.push_back({touching[0], touching[1], internal_lengths[k]});
  }
  d.side_vertex.assign(V, -1);
  for (int s = 0; s < V; ++s) {
    int a = s, b = (s + 1) % V;
    for (size_t ti = 0; ti < e.triangles.size(); ++ti)
      if (tri_has(e.triangles[ti], a, b)) {
        d.side_vertex[s] = static_cast<int>(ti);
        break;
      }
    if (d.side_vertex[s] < 0) throw domain_error("inconsistent lengths: malformed expansion");
  }
  return d;
}

}  // namespace

PoleLeafSpace build_pole_leafspace_positive(int n, const ExpansionType& expansion,
                                            const std::vector<double>& internal_lengths,
                                            double a_first, double a_last) {
  if (n < 3) throw domain_error("pole leaf space requires n >= 3");
  if (expansion.leaf_count != n)
    throw domain_error("inconsistent lengths: expansion must have n leaves");
  if (a_first < 0 || a_last < 0) throw domain_error("negative measure");
  if (a_first + a_last <= 0)
    throw domain_error("inconsistent lengths: a_0 and a_{n-1} cannot both be zero");

  DualTree d = dual_tree(expansion, internal_lengths);
  int q_minus = d.vertex_count;
  int q_plus = d.vertex_count + 1;
  std::vector<MetricTree::Edge> edges = d.edges;
  edges.push_back({q_minus, d.side_vertex[0], a_first});
  edges.push_back({q_plus, d.side_vertex[n - 1], a_last});
  std::vector<MetricTree::Ray> rays;
  for (int leaf = 1; leaf <= n - 2; ++leaf) rays.push_back({d.side_vertex[leaf], leaf - 1});

  std::vector<int> vmap;
  PoleLeafSpace out;
  out.pole_order = n;
  out.kind = LeafSpaceCase::positive_measure;
  out.domain = MetricTree::build(d.vertex_count + 2, std::move(edges), std::move(rays), &vmap);
  out.axis = out.domain.path(vmap[q_minus], vmap[q_plus]);
  out.translation_length = out.domain.path_length(vmap[q_minus], vmap[q_plus]);
  out.domain.marked_axis = out.axis;
  out.domain.boundary_measure = out.translation_length;
  out.strip_widths = internal_lengths;
  out.strip_widths.push_back(a_first);
  out.strip_widths.push_back(a_last);
  out.parameter_count = (n - 3) + 1;
  if (out.translation_length <= 0)
    throw domain_error("inconsistent lengths: positive case needs a positive translation");
  return out;
}

PoleLeafSpace build_pole_leafspace_zero(int n, const ExpansionType& expansion,
                                        const std::vector<double>& internal_lengths,
                                        double root_width) {
  if (n < 3) throw domain_error("pole leaf space requires n >= 3");
  if (expansion.leaf_count != n - 1)
    throw domain_error("inconsistent lengths: zero case expects an expansion on n-1 leaves");

  DualTree d = dual_tree(expansion, internal_lengths);
  // negative width = the boundary strip is asymptotic to the other adjacent
  // labeled direction; reattach the stem there and store |width|
  int attach = root_width >= 0 ? d.side_vertex[0] : d.side_vertex[n - 2];
  int root = d.vertex_count;
  std::vector<MetricTree::Edge> edges = d.edges;
  edges.push_back({root, attach, std::abs(root_width)});
  std::vector<MetricTree::Ray> rays;
  for (int leaf = 1; leaf <= n - 2; ++leaf) rays.push_back({d.side_vertex[leaf], leaf - 1});

  std::vector<int> vmap;
  PoleLeafSpace out;
  out.pole_order = n;
  out.kind = LeafSpaceCase::zero_measure;
  out.domain = MetricTree::build(d.vertex_count + 1, std::move(edges), std::move(rays), &vmap);
  out.root = vmap[root];
  out.domain.marked_point = out.root;
  out.domain.boundary_measure = 0.0;
  out.translation_length = 0.0;
  out.strip_widths = internal_lengths;
  out.strip_widths.push_back(std::abs(root_width));
  out.parameter_count = (n - 3) + 1;
  return out;
}

PoleLeafSpace build_pole_leafspace(int n, double boundary_measure,
                                   const ExpansionType& expansion,
                                   const std::vector<double>& internal_lengths,
                                   double a_first, double a_last) {
  if (boundary_measure < 0) throw domain_error("negative measure");
  if (boundary_measure == 0.0)
    return build_pole_leafspace_zero(n, expansion, internal_lengths, a_first);
  PoleLeafSpace out =
      build_pole_leafspace_positive(n, expansion, internal_lengths, a_first, a_last);
  if (!nearly_equal(out.translation_length, boundary_measure, 1e-9))
    throw domain_error("inconsistent lengths: translation does not match the boundary measure");
  out.translation_length = boundary_measure;
  return out;
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

namespace {

struct AxisPositions {
  std::vector<int> vertices;
  std::vector<double> pos;
};

AxisPositions axis_positions(const MetricTree& t, const std::vector<int>& axis) {
  AxisPositions ap;
  ap.vertices = axis;
  ap.pos.push_back(0.0);
  for (size_t i = 0; i + 1 < axis.size(); ++i) {
    double len = -1;
    for (const auto& e : t.edges)
      if ((e.u == axis[i] && e.v == axis[i + 1]) || (e.v == axis[i] && e.u == axis[i + 1]))
        len = e.length;
    if (len < 0) throw domain_error("marked data missing: axis is not an edge path");
    ap.pos.push_back(ap.pos.back() + len);
  }
  return ap;
}

bool on_axis(const std::vector<int>& axis, int v) {
  return std::find(axis.begin(), axis.end(), v) != axis.end();
}

}  // namespace

MetricTree glue_trees(const MetricTree& t0, const PoleLeafSpace& tu) {
  if (tu.kind == LeafSpaceCase::positive_measure) {
    if (t0.marked_axis.size() < 2 || !t0.boundary_measure)
      throw domain_error("marked data missing: positive-case gluing needs a marked axis");
    if (!nearly_equal(*t0.boundary_measure, tu.translation_length, 1e-9))
      throw domain_error("measure mismatch: boundary measures disagree");

    AxisPositions a0 = axis_positions(t0, t0.marked_axis);
    AxisPositions au = axis_positions(tu.domain, tu.axis);
    const double tau = a0.pos.back();
    if (!nearly_equal(tau, au.pos.back(), 1e-9))
      throw domain_error("measure mismatch: axis lengths disagree");

    // merged breakpoints along [0, tau]
    std::vector<double> cuts = a0.pos;
    cuts.insert(cuts.end(), au.pos.begin(), au.pos.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double x, double y) { return std::abs(x - y) < 1e-12 * (1 + tau); }),
               cuts.end());

    const int n_cuts = static_cast<int>(cuts.size());
    auto cut_index = [&](double p) {
      for (int i = 0; i < n_cuts; ++i)
        if (std::abs(cuts[i] - p) < 1e-9 * (1 + tau)) return i;
      throw domain_error("measure mismatch: axis positions fail to align");
    };

    // new vertex ids: chain first, then off-axis vertices of both trees
    std::vector<int> map0(t0.vertex_count, -1), mapu(tu.domain.vertex_count, -1);
    int next = n_cuts;
    for (size_t i = 0; i < a0.vertices.size(); ++i) map0[a0.vertices[i]] = cut_index(a0.pos[i]);
    for (size_t i = 0; i < au.vertices.size(); ++i) mapu[au.vertices[i]] = cut_index(au.pos[i]);
    for (int v = 0; v < t0.vertex_count; ++v)
      if (map0[v] < 0) map0[v] = next++;
    for (int v = 0; v < tu.domain.vertex_count; ++v)
      if (mapu[v] < 0) mapu[v] = next++;

    std::vector<MetricTree::Edge> edges;
    for (int i = 0; i + 1 < n_cuts; ++i) edges.push_back({i, i + 1, cuts[i + 1] - cuts[i]});
    for (const auto& e : t0.edges) {
      if (on_axis(t0.marked_axis, e.u) && on_axis(t0.marked_axis, e.v)) continue;
      edges.push_back({map0[e.u], map0[e.v], e.length});
    }
    for (const auto& e : tu.domain.edges) {
      if (on_axis(tu.axis, e.u) && on_axis(tu.axis, e.v)) continue;
      edges.push_back({mapu[e.u], mapu[e.v], e.length});
    }
    std::vector<MetricTree::Ray> rays;
    int label_offset = 0;
    for (const auto& r : t0.rays) {
      rays.push_back({map0[r.vertex], r.label});
      label_offset = std::max(label_offset, r.label + 1);
    }
    for (const auto& r : tu.domain.rays) rays.push_back({mapu[r.vertex], r.label + label_offset});

    MetricTree glued = MetricTree::build(next, std::move(edges), std::move(rays));
    if (!glued.is_tree()) throw domain_error("glue_trees: result is not a tree");
    return glued;
  }

  // zero-measure case: identify the root with the marked point and keep the
  // Z-many attached copies as one labeled copy plus the multiplicity marker
  if (!t0.marked_point) throw domain_error("marked data missing: zero-case gluing needs a point");
  if (tu.translation_length != 0.0 ||
      (t0.boundary_measure && *t0.boundary_measure != 0.0))
    throw domain_error("measure mismatch: zero-case gluing needs zero measures");
  if (!tu.root) throw domain_error("marked data missing: leaf space has no root");

  std::vector<int> mapu(tu.domain.vertex_count, -1);
  int next = t0.vertex_count;
  mapu[*tu.root] = *t0.marked_point;
  for (int v = 0; v < tu.domain.vertex_count; ++v)
    if (mapu[v] < 0) mapu[v] = next++;

  std::vector<MetricTree::Edge> edges = t0.edges;
  for (const auto& e : tu.domain.edges) edges.push_back({mapu[e.u], mapu[e.v], e.length});
  std::vector<MetricTree::Ray> rays = t0.rays;
  int label_offset = 0;
  for (const auto& r : t0.rays) label_offset = std::max(label_offset, r.label + 1);
  for (const auto& r : tu.domain.rays) rays.push_back({mapu[r.vertex], r.label + label_offset});

  MetricTree glued = MetricTree::build(next, std::move(edges), std::move(rays));
  glued.z_orbit_vertex = *t0.marked_point;
  if (!glued.is_tree()) throw domain_error("glue_trees: result is not a tree");
  return glued;
}

// ---------------------------------------------------------------------------
// Dimension formulas
// ---------------------------------------------------------------------------

MfDimension mf_dimension(int genus, const std::vector<int>& pole_orders) {
  if (pole_orders.empty()) throw domain_error("empty order list");
  for (int n : pole_orders)
    if (n < 3) throw domain_error("pole orders must be >= 3");
  MfDimension d;
  const int k = static_cast<int>(pole_orders.size());
  int sum = 0;
  for (int n : pole_orders) {
    sum += n + 1;
    d.pointed_pole_dims.push_back(n - 1);
  }
  d.chi = 6 * genus - 6 + sum;
  d.boundary_surface_dim = 6 * genus - 6 + 3 * k;
  d.outside_stated_range = genus < 2;
  int combined = d.boundary_surface_dim - k;
  for (int v : d.pointed_pole_dims) combined += v;
  d.consistency_ok = combined == d.chi;
  return d;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

JsonValue tree_to_json(const MetricTree& t) {
  JsonValue j;
  j.set("vertices", JsonValue(int64_t(t.vertex_count)));
  JsonValue edges{JsonValue::Array{}};
  for (const auto& e : t.edges)
    edges.push_back(JsonValue(JsonValue::Array{e.u, e.v, e.length}));
  j.set("edges", std::move(edges));
  JsonValue rays{JsonValue::Array{}};
  for (const auto& r : t.rays) rays.push_back(JsonValue(JsonValue::Array{r.vertex, r.label}));
  j.set("rays", std::move(rays));
  if (t.basepoint) j.set("basepoint", JsonValue(int64_t(*t.basepoint)));
  if (t.z_orbit_vertex) j.set("z_orbit_vertex", JsonValue(int64_t(*t.z_orbit_vertex)));
  return j;
}

std::string tree_to_dot(const MetricTree& t) {
  std::string out = "graph leafspace {\n  node [shape=point];\n";
  for (const auto& e : t.edges)
    out += "  v" + std::to_string(e.u) + " -- v" + std::to_string(e.v) + " [label=\"" +
           format_double(e.length) + "\"];\n";
  for (const auto& r : t.rays) {
    std::string rid = "ray" + std::to_string(r.label);
    out += "  " + rid + " [shape=plaintext, label=\"" + std::to_string(r.label) + "\"];\n";
    out += "  v" + std::to_string(r.vertex) + " -- " + rid + " [style=dashed];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace folia
