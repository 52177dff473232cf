#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oldr/geometry.hpp"

using namespace oldr;

TEST(Workspace, Dimensions) {
  const auto ws = build_workspace(3, 3);
  EXPECT_DOUBLE_EQ(ws.w, 14.0);
  EXPECT_NEAR(ws.h, 3 * 4 / std::sqrt(3.0) + 2, 1e-9);
  EXPECT_NEAR(ws.h, 8.9282, 1e-4);
  EXPECT_DOUBLE_EQ(build_workspace(2, 3).w, 10.0);
}

TEST(Workspace, RejectsSmall) {
  EXPECT_THROW(build_workspace(1, 3), Error);
  EXPECT_THROW(build_workspace(2, 2), Error);
  try {
    build_workspace(1, 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::bounds);
  }
}

class GridSizes : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(GridSizes, Invariants) {
  const auto [n1, n2] = GetParam();
  const auto g = build_grid(build_workspace(n1, n2));
  const auto& ws = g.workspace;
  for (const auto& v : g.vertices) {
    EXPECT_GE(v.x, 1 - 1e-9);
    EXPECT_LE(v.x, ws.w - 1 + 1e-9);
    EXPECT_GE(v.y, 1 - 1e-9);
    EXPECT_LE(v.y, ws.h - 1 + 1e-9);
  }
  for (auto [a, b] : g.edges) EXPECT_NEAR(distance(g.vertices[a], g.vertices[b]), 4 / std::sqrt(3.0), 1e-9);
  for (std::size_t v = 0; v < g.size(); ++v)
    for (int u : g.adjacency[v]) EXPECT_TRUE(g.adjacent(u, static_cast<int>(v)));
  // Triangle closure: every 3-clique appears exactly once.
  std::set<std::array<int, 3>> tris(g.triangles.begin(), g.triangles.end());
  EXPECT_EQ(tris.size(), g.triangles.size());
  std::size_t cliques = 0;
  for (auto [a, b] : g.edges)
    for (int c : g.adjacency[b])
      if (c > b && g.adjacent(a, c)) ++cliques;
  EXPECT_EQ(cliques, g.triangles.size());
  for (const auto& t : g.triangles) {
    EXPECT_TRUE(g.adjacent(t[0], t[1]));
    EXPECT_TRUE(g.adjacent(t[1], t[2]));
    EXPECT_TRUE(g.adjacent(t[0], t[2]));
  }
  // Vertical family covers V, families vertex-disjoint.
  std::vector<int> seen(g.size(), 0);
  for (const auto& p : g.vertical_paths)
    for (int v : p) ++seen[v];
  for (int s : seen) EXPECT_EQ(s, 1);
  std::vector<int> seen_z(g.size(), 0);
  for (const auto& p : g.zigzag_paths) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) EXPECT_TRUE(g.adjacent(p[i], p[i + 1]));
    for (int v : p) EXPECT_EQ(seen_z[v]++, 0);
  }
  for (const auto& p : g.vertical_paths)
    for (std::size_t i = 0; i + 1 < p.size(); ++i) EXPECT_TRUE(g.adjacent(p[i], p[i + 1]));
  // Interior vertices have degree 6.
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto lp = g.lattice[v];
    if (lp.col > 0 && lp.col < g.columns - 1 && lp.half_row > 1 && lp.half_row < g.half_rows - 2) {
      EXPECT_EQ(g.adjacency[v].size(), 6u);
    }
  }
}

TEST_P(GridSizes, HexCoverCoverage) {
  const auto [n1, n2] = GetParam();
  const auto g = build_grid(build_workspace(n1, n2));
  std::vector<char> cov(g.size(), 0);
  for (const auto& cover : g.hex.covers)
    for (const auto& hx : cover) {
      for (int d = 0; d < 6; ++d) {
        const int a = hx.ring[d], b = hx.ring[(d + 1) % 6], c = hx.ring[(d + 2) % 6];
        EXPECT_TRUE(g.adjacent(a, b));
        EXPECT_NEAR(angle_deg(g.vertices[b], g.vertices[a], g.vertices[c]), 120.0, 1e-9);
        EXPECT_FALSE(g.share_triangle(a, b, b, c));
        cov[a] = 1;
      }
    }
  for (int f : g.hex.frozen) cov[f] = 1;
  for (char c : cov) EXPECT_TRUE(c);
  EXPECT_EQ(g.hex.frozen.size(), 4u);
  for (int f : g.hex.frozen) EXPECT_EQ(g.adjacency[f].size(), 2u);
}

TEST_P(GridSizes, NearestVertexMatchesBruteForce) {
  const auto [n1, n2] = GetParam();
  const auto g = build_grid(build_workspace(n1, n2));
  std::mt19937_64 rng(n1 * 100 + n2);
  std::uniform_real_distribution<double> ux(1, g.workspace.w - 1), uy(1, g.workspace.h - 1);
  for (int it = 0; it < 2000; ++it) {
    const Vec2 p{ux(rng), uy(rng)};
    int best = 0;
    for (std::size_t v = 1; v < g.size(); ++v)
      if (distance(g.vertices[v], p) < distance(g.vertices[best], p) - 1e-12) best = static_cast<int>(v);
    EXPECT_NEAR(distance(g.vertices[g.nearest_vertex(p)], p), distance(g.vertices[best], p), 1e-12);
    EXPECT_LE(distance(g.vertices[g.nearest_vertex(p)], p), 4.0 / 3.0 + 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, GridSizes,
                         ::testing::Values(std::pair{2, 3}, std::pair{3, 3}, std::pair{3, 4},
                                           std::pair{5, 7}, std::pair{7, 16}));

TEST(Grid, Fig1Scale) {
  const auto g = build_grid(build_workspace(3, 3));
  EXPECT_EQ(g.columns, 7);  // 7 vertex columns bound 6 columns of triangles
  EXPECT_EQ(g.size(), 25u);
  EXPECT_EQ(build_grid(build_workspace(2, 3)).size(), 18u);
}

TEST(Grid, Deterministic) {
  const auto a = build_grid(build_workspace(4, 5));
  const auto b = build_grid(build_workspace(4, 5));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.vertices[i].x, b.vertices[i].x);
    EXPECT_EQ(a.vertices[i].y, b.vertices[i].y);
  }
  EXPECT_EQ(a.triangles, b.triangles);
}

TEST(Grid, RowMajorIds) {
  const auto g = build_grid(build_workspace(3, 4));
  for (std::size_t i = 1; i < g.size(); ++i) {
    const auto p = g.vertices[i - 1], q = g.vertices[i];
    EXPECT_TRUE(p.y < q.y - 1e-12 || (std::abs(p.y - q.y) < 1e-12 && p.x < q.x));
  }
}

TEST(Constants, Circumradius) {
  EXPECT_NEAR(triangle_circumradius(), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(kEdge / std::sqrt(3.0), 4.0 / 3.0, 1e-12);
  // Monte Carlo: points in one lattice triangle are within 4/3 of a corner.
  const auto g = build_grid(build_workspace(3, 3));
  const auto t = g.triangles[5];
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 100000; ++i) {
    double a = u(rng), b = u(rng);
    if (a + b > 1) { a = 1 - a; b = 1 - b; }
    const Vec2 p = g.vertices[t[0]] + a * (g.vertices[t[1]] - g.vertices[t[0]]) +
                   b * (g.vertices[t[2]] - g.vertices[t[0]]);
    double d = 1e9;
    for (int k : t) d = std::min(d, distance(p, g.vertices[k]));
    worst = std::max(worst, d);
  }
  EXPECT_LE(worst, 4.0 / 3.0 + 1e-9);
  EXPECT_GT(worst, 1.3);
}

TEST(Constants, Density) {
  EXPECT_NEAR(density_limit(), 0.5101, 0.0005);
  EXPECT_NEAR(std::numbers::pi / 2, 1.5708, 1e-4);
  EXPECT_NEAR(0.5 * kSeparation * (4 / std::sqrt(3.0)), 16 / (3 * std::sqrt(3.0)), 1e-12);
  EXPECT_NEAR(16 / (3 * std::sqrt(3.0)), 3.0792, 1e-4);
}

TEST(SharpAngles, ThreePerTriangle) {
  const auto g = build_grid(build_workspace(3, 4));
  const auto angles = enumerate_sharp_angles(g);
  EXPECT_EQ(angles.size(), 3 * g.triangles.size());
  std::set<std::array<int, 3>> uniq;
  for (const auto& a : angles) {
    EXPECT_TRUE(g.adjacent(a.apex, a.arm1));
    EXPECT_TRUE(g.adjacent(a.apex, a.arm2));
    EXPECT_NEAR(angle_deg(g.vertices[a.apex], g.vertices[a.arm1], g.vertices[a.arm2]), 60.0, 1e-9);
    uniq.insert({a.apex, std::min(a.arm1, a.arm2), std::max(a.arm1, a.arm2)});
  }
  EXPECT_EQ(uniq.size(), angles.size());
}

TEST(HexCovers, TwoThirdsCoverage) {
  const auto g = build_grid(build_workspace(12, 20));
  for (const auto& cover : g.hex.covers) {
    std::set<int> vs;
    for (const auto& hx : cover) vs.insert(hx.ring.begin(), hx.ring.end());
    const double frac = static_cast<double>(vs.size()) / g.size();
    EXPECT_GT(frac, 0.55);
    EXPECT_LT(frac, 0.7);
  }
}

TEST(Rotate, SixStepsIdentity) {
  for (const auto& d : kDirections) {
    EXPECT_EQ(rotate60(d, 6), d);
    EXPECT_EQ(rotate60(d, 1), kDirections[(&d - kDirections.data() + 1) % 6]);
  }
}
