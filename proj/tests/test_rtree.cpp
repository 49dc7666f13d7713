#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "folia/rtree.hpp"

using folia::ExpansionType;
using folia::MetricTree;
using folia::PoleLeafSpace;

namespace {

using Signature = std::set<std::pair<int, int>>;

// Independent brute-force enumeration of planar trivalent trees with V
// cyclically labeled leaves: root at leaf V-1 and enumerate all binary
// bracketings of leaves 0..V-2.  Each internal edge is the contiguous leaf
// interval under it, which is exactly the interval split off by a polygon
// diagonal in the triangulation encoding.
std::vector<Signature> bracketings(int lo, int hi) {
  if (lo == hi) return {Signature{}};
  std::vector<Signature> out;
  for (int s = lo; s < hi; ++s) {
    for (const auto& left : bracketings(lo, s)) {
      for (const auto& right : bracketings(s + 1, hi)) {
        Signature sig = left;
        sig.insert(right.begin(), right.end());
        if (s > lo) sig.insert({lo, s});
        if (hi > s + 1) sig.insert({s + 1, hi});
        out.push_back(std::move(sig));
      }
    }
  }
  return out;
}

std::set<Signature> oracle_types(int valence) {
  auto all = bracketings(0, valence - 2);
  return {all.begin(), all.end()};
}

Signature implementation_signature(const ExpansionType& t) {
  Signature sig;
  for (auto [a, b] : t.diagonals) sig.insert({a, b - 1});
  return sig;
}

long catalan(int n) {
  long c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace

TEST_CASE("expansion enumeration matches the brute-force oracle") {
  for (int v = 3; v <= 9; ++v) {
    auto types = folia::enumerate_expansions(v);
    auto oracle = oracle_types(v);
    CHECK(types.size() == oracle.size());
    CHECK(static_cast<long>(types.size()) == catalan(v - 2));
    std::set<Signature> got;
    for (const auto& t : types) {
      CHECK(t.parameter_count() == v - 3);
      CHECK(static_cast<int>(t.diagonals.size()) == v - 3);
      got.insert(implementation_signature(t));
    }
    CHECK(got == oracle);
  }
  CHECK_THROWS_AS(folia::enumerate_expansions(2), folia::domain_error);
}

TEST_CASE("whitehead moves connect exactly two types through each collapse") {
  for (int v : {4, 5}) {
    auto types = folia::enumerate_expansions(v);
    for (size_t ti = 0; ti < types.size(); ++ti) {
      for (int d = 0; d < static_cast<int>(types[ti].diagonals.size()); ++d) {
        int nb = folia::whitehead_neighbor(types[ti], d, types);
        CHECK(nb != static_cast<int>(ti));
        // collapsing the same edge from either side gives the same 4-valent
        // degeneration: removing the flipped diagonal must recover it
        Signature degenerate = implementation_signature(types[ti]);
        degenerate.erase({types[ti].diagonals[d].first, types[ti].diagonals[d].second - 1});
        int matches = 0;
        for (const auto& other : types) {
          Signature s = implementation_signature(other);
          bool contains = std::includes(s.begin(), s.end(), degenerate.begin(),
                                        degenerate.end());
          if (contains) ++matches;
        }
        CHECK(matches == 2);  // the type itself and its unique re-expansion
        // the move is an involution
        const auto& flipped = types[nb];
        bool found_back = false;
        for (int d2 = 0; d2 < static_cast<int>(flipped.diagonals.size()); ++d2)
          if (folia::whitehead_neighbor(flipped, d2, types) == static_cast<int>(ti))
            found_back = true;
        CHECK(found_back);
      }
    }
  }
}

TEST_CASE("pole leaf space: n = 4, zero measure, single strip of width a") {
  auto expansions = folia::enumerate_expansions(3);  // rooted datum on n-1 leaves
  REQUIRE(expansions.size() == 1);
  auto ls = folia::build_pole_leafspace_zero(4, expansions[0], {}, 0.8);
  CHECK(ls.kind == folia::LeafSpaceCase::zero_measure);
  CHECK(ls.translation_length == 0.0);
  CHECK(ls.domain.rays.size() == 2);
  REQUIRE(ls.domain.edges.size() == 1);
  CHECK(ls.domain.edges[0].length == doctest::Approx(0.8));
  CHECK(ls.parameter_count == 2);
  CHECK(ls.root.has_value());
  CHECK(ls.domain.degree(*ls.root) == 1);

  // negative width reattaches the stem at the other labeled direction
  auto neg = folia::build_pole_leafspace_zero(4, expansions[0], {}, -0.8);
  CHECK(neg.domain.edges[0].length == doctest::Approx(0.8));
}

TEST_CASE("pole leaf space: n = 5, positive measure, generic expansion") {
  auto expansions = folia::enumerate_expansions(5);
  REQUIRE(expansions.size() == 5);
  auto ls = folia::build_pole_leafspace_positive(5, expansions[0], {0.4, 0.7}, 0.2, 0.5);
  CHECK(ls.kind == folia::LeafSpaceCase::positive_measure);
  CHECK(ls.domain.rays.size() == 3);
  CHECK(ls.domain.edges.size() == 4);  // n - 1 finite edges in the generic case
  CHECK(ls.translation_length > 0);
  CHECK(ls.parameter_count == 3);
  REQUIRE(ls.axis.size() >= 2);
  // the translation is realized as the q- -> q+ path length
  CHECK(ls.domain.path_length(ls.axis.front(), ls.axis.back()) ==
        doctest::Approx(ls.translation_length));
}

TEST_CASE("pole leaf space: n = 3 positive case has a single ray") {
  auto expansions = folia::enumerate_expansions(3);
  auto ls = folia::build_pole_leafspace_positive(3, expansions[0], {}, 0.3, 0.9);
  CHECK(ls.domain.rays.size() == 1);
  CHECK(ls.translation_length == doctest::Approx(1.2));
  CHECK(ls.parameter_count == 1);
  CHECK_THROWS_AS(folia::build_pole_leafspace_positive(3, expansions[0], {}, 0.0, 0.0),
                  folia::domain_error);
}

TEST_CASE("pole leaf space parameter dimension is (n-3) + 1 for n in [3, 10]") {
  for (int n = 3; n <= 10; ++n) {
    auto exp_pos = folia::enumerate_expansions(n);
    std::vector<double> lengths(n - 3, 0.25);
    auto posi = folia::build_pole_leafspace_positive(n, exp_pos[0], lengths, 0.1, 0.2);
    CHECK(posi.parameter_count == (n - 3) + 1);
    CHECK(static_cast<int>(posi.domain.rays.size()) == n - 2);
    CHECK(folia::build_pole_leafspace(n, posi.translation_length, exp_pos[0], lengths, 0.1,
                                      0.2)
              .parameter_count == (n - 3) + 1);
    if (n >= 4) {
      auto exp_zero = folia::enumerate_expansions(n - 1);
      std::vector<double> zl(n - 4, 0.4);
      auto zero = folia::build_pole_leafspace_zero(n, exp_zero[0], zl, 0.7);
      CHECK(zero.parameter_count == (n - 3) + 1);
      CHECK(static_cast<int>(zero.domain.rays.size()) == n - 2);
    }
  }
}

TEST_CASE("measure mismatch is rejected by the dispatcher") {
  auto expansions = folia::enumerate_expansions(3);
  CHECK_THROWS_AS(folia::build_pole_leafspace(3, 5.0, expansions[0], {}, 0.3, 0.9),
                  folia::domain_error);
  CHECK_THROWS_AS(folia::build_pole_leafspace(3, -1.0, expansions[0], {}, 0.3, 0.9),
                  folia::domain_error);
}

TEST_CASE("smallest gluing: axis plus one ray") {
  auto expansions = folia::enumerate_expansions(3);
  auto tu = folia::build_pole_leafspace_positive(3, expansions[0], {}, 0.3, 0.9);
  REQUIRE(tu.translation_length == doctest::Approx(1.2));

  MetricTree t0 = MetricTree::build(2, {{0, 1, 1.2}}, {});
  t0.marked_axis = {0, 1};
  t0.boundary_measure = 1.2;
  MetricTree glued = folia::glue_trees(t0, tu);
  CHECK(glued.is_tree());
  CHECK(glued.rays.size() == 1);
  CHECK(glued.total_edge_length() == doctest::Approx(1.2));
  CHECK(glued.edges.size() == 2);  // axis split at the ray attachment
}

TEST_CASE("zero-measure gluing attaches the rooted domain at the marked point") {
  auto expansions = folia::enumerate_expansions(3);
  auto tu = folia::build_pole_leafspace_zero(4, expansions[0], {}, 0.6);

  MetricTree t0 = MetricTree::build(3, {{0, 1, 0.5}, {1, 2, 0.25}}, {});
  t0.marked_point = 1;
  MetricTree glued = folia::glue_trees(t0, tu);
  CHECK(glued.is_tree());
  CHECK(glued.rays.size() == 2);
  CHECK(glued.edges.size() == t0.edges.size() + tu.domain.edges.size());
  REQUIRE(glued.z_orbit_vertex.has_value());
  CHECK(*glued.z_orbit_vertex == 1);
}

TEST_CASE("gluing with mismatched measures fails") {
  auto expansions = folia::enumerate_expansions(3);
  auto tu = folia::build_pole_leafspace_positive(3, expansions[0], {}, 0.3, 0.9);
  MetricTree t0 = MetricTree::build(2, {{0, 1, 0.7}}, {});
  t0.marked_axis = {0, 1};
  t0.boundary_measure = 0.7;
  CHECK_THROWS_AS(folia::glue_trees(t0, tu), folia::domain_error);
  MetricTree bare = MetricTree::build(2, {{0, 1, 1.2}}, {});
  CHECK_THROWS_AS(folia::glue_trees(bare, tu), folia::domain_error);
}

TEST_CASE("randomized gluings always produce trees") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> len(0.05, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 3 + int(rng() % 6);  // pole order 3..8
    auto expansions = folia::enumerate_expansions(n);
    const auto& exp = expansions[rng() % expansions.size()];
    std::vector<double> lengths;
    for (int i = 0; i < n - 3; ++i) lengths.push_back(len(rng));
    auto tu = folia::build_pole_leafspace_positive(n, exp, lengths, len(rng), len(rng));

    // T0: a random chain subdivided into 1..4 edges with total length tau
    int chain = 1 + int(rng() % 4);
    std::vector<MetricTree::Edge> edges;
    double tau = tu.translation_length;
    double used = 0;
    for (int e = 0; e < chain; ++e) {
      double l = (e == chain - 1) ? tau - used : tau * (0.2 + 0.6 * (e + 1) / (chain + 1)) / chain;
      l = std::max(l, 1e-3);
      if (e == chain - 1) l = tau - used;
      edges.push_back({e, e + 1, l});
      used += l;
    }
    MetricTree t0 = MetricTree::build(chain + 1, edges, {});
    std::vector<int> axis;
    for (int v = 0; v <= chain; ++v) axis.push_back(v);
    t0.marked_axis = axis;
    t0.boundary_measure = tau;
    MetricTree glued = folia::glue_trees(t0, tu);
    CHECK(glued.is_tree());
    CHECK(static_cast<int>(glued.edges.size()) == glued.vertex_count - 1);
    CHECK(glued.rays.size() == tu.domain.rays.size());
  }
}

TEST_CASE("dimension formulas") {
  auto d = folia::mf_dimension(2, {3});
  CHECK(d.chi == 10);
  CHECK(!d.outside_stated_range);
  CHECK(d.boundary_surface_dim == 9);  // 6g - 6 + 3b with b = 1
  REQUIRE(d.pointed_pole_dims.size() == 1);
  CHECK(d.pointed_pole_dims[0] == 2);
  CHECK(d.consistency_ok);

  auto d5 = folia::mf_dimension(2, {5});
  CHECK(d5.pointed_pole_dims[0] == 4);

  auto low = folia::mf_dimension(0, {6});
  CHECK(low.outside_stated_range);
  CHECK(low.chi == 1);

  for (int g = 2; g <= 5; ++g)
    for (int k = 1; k <= 4; ++k)
      for (int n = 3; n <= 8; ++n) {
        std::vector<int> orders(k, n);
        CHECK(folia::mf_dimension(g, orders).consistency_ok);
      }
  CHECK_THROWS_AS(folia::mf_dimension(2, {}), folia::domain_error);
}

TEST_CASE("tree exports") {
  MetricTree t = MetricTree::build(3, {{0, 1, 0.5}, {1, 2, 0.25}}, {{2, 0}, {0, 1}});
  auto j = folia::tree_to_json(t).dump();
  CHECK(j.find("\"edges\"") != std::string::npos);
  CHECK(j.find("0.5") != std::string::npos);
  auto dot = folia::tree_to_dot(t);
  CHECK(dot.find("graph") != std::string::npos);
  CHECK(dot.find("v0 -- v1") != std::string::npos);
}

TEST_CASE("zero-length edges are contracted on construction") {
  MetricTree t = MetricTree::build(4, {{0, 1, 0.0}, {1, 2, 0.5}, {2, 3, 0.0}}, {{3, 0}});
  CHECK(t.vertex_count == 2);
  CHECK(t.edges.size() == 1);
  CHECK(t.rays.size() == 1);
}
