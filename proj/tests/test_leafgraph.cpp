#include "hypdyn/errors.hpp"
#include "hypdyn/leafgraph.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>

using namespace hypdyn;
using namespace testing_support;

namespace {

Point origin2() { return TorusPoint{Vec::Zero(2)}; }

LeafSample cat_line(double window, double spacing, Side side = Side::stable) {
  SampleSpec spec;
  spec.window = window;
  spec.spacing = spacing;
  return leaf_sample(cat_system(), origin2(), side, spec);
}

bool subset(const LeafGraph& a, const LeafGraph& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (auto j : a.adjacency[i])
      if (!b.adjacent(i, j)) return false;
  return true;
}

}  // namespace

TEST(BuildGamma, ExtremeLevels) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.2, 0.01);
  const LogScaleConfig cfg;
  const EllMatrix ell = internal_ell_matrix(cat, s, cfg);
  const LeafGraph all = build_gamma(ell, -cfg.n_max);
  EXPECT_EQ(all.edge_count(), s.size() * (s.size() - 1) / 2);
  EXPECT_EQ(build_gamma(ell, cfg.n_max + 1).edge_count(), 0u);
}

TEST(BuildGamma, CatNeighbourhoodRadius) {
  const System cat = cat_system();
  const double h = 1e-4;
  const LeafSample s = cat_line(0.05, h);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});
  const LeafGraph g = build_gamma(ell, 3);
  const double radius = 0.05 * std::pow(kCatExpansion, -3);
  for (std::size_t i : {std::size_t{0}, s.size() / 3, s.size() / 2, s.size() - 1})
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const double arc = std::abs(s.params[j] - s.params[i]);
      if (arc < radius - h) EXPECT_TRUE(g.adjacent(i, j));
      if (arc > radius + h) EXPECT_FALSE(g.adjacent(i, j));
    }
}

TEST(GraphDistance, TrivialCases) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.2, 0.01);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});
  const LeafGraph g = build_gamma(ell, 1);
  EXPECT_EQ(graph_distance(g, 5, 5), 0);
  ASSERT_FALSE(g.adjacency[5].empty());
  EXPECT_EQ(graph_distance(g, 5, g.adjacency[5].front()), 1);
}

TEST(GraphDistance, CatGrowthRatio) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.05, 1e-4);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});
  const std::size_t i = 300, j = 700;
  ASSERT_NEAR(s.params[j] - s.params[i], 0.04, 1e-9);
  const double d4 = graph_distance(build_gamma(ell, 4), i, j);
  const double d5 = graph_distance(build_gamma(ell, 5), i, j);
  EXPECT_NEAR(d5 / d4, kCatExpansion, 0.2 * kCatExpansion);
}

TEST(GraphDistance, NestingAndMonotonicity) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.2, 1e-3);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});
  for (int n = 0; n < 6; ++n) {
    const LeafGraph lo = build_gamma(ell, n), hi = build_gamma(ell, n + 1);
    EXPECT_TRUE(subset(hi, lo));
    const auto a = bfs_distances(lo, 0), b = bfs_distances(hi, 0);
    for (std::size_t v = 0; v < s.size(); ++v) EXPECT_LE(a[v], b[v]);
  }
}

TEST(GraphDistance, DoublingRecursion) {
  for (const System& sys : {System{cat_system()}, System{ShiftSystem::full(2)}}) {
    SampleSpec spec;
    spec.spacing = 1e-3;
    spec.depth = 6;
    const LeafSample s = leaf_sample(sys, default_base_point(sys), Side::stable, spec);
    const EllMatrix ell = internal_ell_matrix(sys, s, LogScaleConfig{});
    const double delta = estimate_delta(sample_triples(ell, 200000, 3)).delta;
    const int d = std::max(1, static_cast<int>(std::ceil(delta)));
    for (int n = 0; n <= 4; ++n) {
      const auto lo = bfs_distances(build_gamma(ell, n), 0);
      const auto hi = bfs_distances(build_gamma(ell, n + d), 0);
      for (std::size_t v = 1; v < s.size(); ++v) {
        if (lo[v] == kInfiniteDistance) {
          EXPECT_EQ(hi[v], kInfiniteDistance);
          continue;
        }
        if (hi[v] != kInfiniteDistance) EXPECT_GE(hi[v], 2 * lo[v] - 1);
      }
    }
  }
}

TEST(BuildGammaPrime, SamePlaqueIsAdjacent) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.01, 0.005);
  const LeafGraph g = build_gamma_prime(cat, s, 0.1, 0);
  EXPECT_TRUE(g.adjacent(1, 2));
  EXPECT_TRUE(g.adjacent(2, 3));
}

TEST(BuildGammaPrime, CoverMustFitBracket) {
  ToralSystem t = cat_system();
  t.bracket_radius = 0.05;
  try {
    build_gamma_prime(t, cat_line(0.1, 0.01), 0.1, 0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoverTooCoarse);
  }
}

TEST(BuildGammaPrime, DynamicsInducesIsomorphism) {
  const ToralSystem t = cat_system();
  const System cat = t;
  const LeafSample s = cat_line(0.2, 2e-3);
  LeafSample image = s;
  image.base = iterate(cat, s.base, 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    image.points[i] = iterate(cat, s.points[i], 1);
    image.offsets[i] = t.matrix * s.offsets[i];
  }
  for (int n = 0; n <= 4; ++n) {
    const LeafGraph a = build_gamma_prime(cat, s, 0.1, n);
    const LeafGraph b = build_gamma_prime(cat, image, 0.1, n + 1);
    EXPECT_EQ(a.adjacency, b.adjacency) << "n = " << n;
  }
}

TEST(BuildGammaPrime, GoldenMeanCylinders) {
  const System g = ShiftSystem::golden_mean();
  SampleSpec spec;
  spec.depth = 3;
  const LeafSample s = leaf_sample(g, default_base_point(g), Side::stable, spec);
  const LeafGraph gp = build_gamma_prime(g, s, 0.1, 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      const auto& x = std::get<SymbolicPoint>(s.points[i]);
      const auto& y = std::get<SymbolicPoint>(s.points[j]);
      bool equal = true;
      for (long k = -1; k <= 10; ++k) equal = equal && x.at(k) == y.at(k);
      EXPECT_EQ(gp.adjacent(i, j), equal);
    }
  EXPECT_GT(connected_components(gp).count, 1u);
}

TEST(BuildGammaPrime, MutualDominationWithGamma) {
  const System cat = cat_system();
  const LeafSample s = cat_line(0.2, 2e-3);
  const EllMatrix ell = internal_ell_matrix(cat, s, LogScaleConfig{});
  int k0 = 0;
  for (; k0 <= 10; ++k0) {
    bool ok = true;
    for (int n = 0; ok && n <= 5; ++n) {
      ok = subset(build_gamma(ell, n), build_gamma_prime(cat, s, 0.1, n - k0)) &&
           subset(build_gamma_prime(cat, s, 0.1, n), build_gamma(ell, n - k0));
    }
    if (ok) break;
  }
  EXPECT_LE(k0, 10);
}

TEST(BuildGammaPrime, BoundedStretch) {
  const System cat = cat_system();
  std::vector<int> stretch;
  for (double spacing : {2e-3, 1e-3}) {
    const LeafSample s = cat_line(0.2, spacing);
    const LeafGraph g0 = build_gamma_prime(cat, s, 0.1, 0), g1 = build_gamma_prime(cat, s, 0.1, 1);
    int a = 0;
    for (std::size_t i = 0; i < s.size(); i += 7) {
      const auto d = bfs_distances(g1, i);
      for (auto j : g0.adjacency[i]) a = std::max(a, d[j]);
    }
    stretch.push_back(a);
  }
  EXPECT_LT(stretch[0], kInfiniteDistance);
  EXPECT_EQ(stretch[0], stretch[1]);
}

TEST(LevelRadii, BracketTheEdgeRule) {
  const ToralSystem t = cat_system();
  const LogScaleConfig cfg;
  for (Side side : {Side::stable, Side::unstable})
    for (int n = -2; n <= 6; ++n) {
      const LevelRadii r = level_radii(t, side, n, cfg);
      ASSERT_LE(r.inner, r.outer);
      const Vec u = t.side_basis(side).col(0);
      EXPECT_GE(internal_ell(PairOrbit::from_displacement(t, 0.999 * r.inner * u), side, cfg).value, n);
      EXPECT_LT(internal_ell(PairOrbit::from_displacement(t, 1.001 * r.outer * u), side, cfg).value, n);
    }
}

TEST(ConnectivityReport, CatMapConnectedAtAllLevels) {
  ConnectivityConfig c;
  c.sample.window = 0.2;
  c.sample.spacing = 1e-4;
  c.n_lo = 0;
  c.n_hi = 8;
  for (Side side : {Side::stable, Side::unstable}) {
    const ConnectivityReport r = connectivity_report(cat_system(), side, c);
    ASSERT_EQ(r.levels.size(), 9u);
    for (const auto& l : r.levels) {
      EXPECT_TRUE(l.connected) << l.n;
      EXPECT_EQ(l.components, 1u);
      EXPECT_LT(l.diameter, kInfiniteDistance);
    }
    EXPECT_TRUE(r.monotone());
  }
}

TEST(ConnectivityReport, FullShiftDisconnectsAboveDefectLevel) {
  const System s = ShiftSystem::full(2);
  SampleSpec spec;
  spec.depth = 4;
  const LeafSample l = leaf_sample(s, default_base_point(s), Side::stable, spec);
  const EllMatrix ell = internal_ell_matrix(s, l, LogScaleConfig{});
  const double delta = estimate_delta(sample_triples(ell, 100000, 1)).delta;
  const int top = ell.max_finite() + static_cast<int>(std::ceil(delta));
  for (int n = top + 1; n <= top + 5; ++n) EXPECT_GT(connected_components(build_gamma(ell, n)).count, 1u);

  ConnectivityConfig c;
  c.sample.depth = 4;
  c.n_lo = -8;
  c.n_hi = 4;
  const ConnectivityReport r = connectivity_report(s, Side::stable, c);
  EXPECT_TRUE(r.monotone());
  for (const auto& lv : r.levels)
    if (lv.n > top) EXPECT_FALSE(lv.connected);
}

TEST(ConnectivityReport, SinglePointSample) {
  ConnectivityConfig c;
  c.sample.window = 0.0;
  const ConnectivityReport r = connectivity_report(cat_system(), Side::stable, c);
  for (const auto& l : r.levels) {
    EXPECT_TRUE(l.connected);
    EXPECT_EQ(l.vertices, 1u);
  }
}
