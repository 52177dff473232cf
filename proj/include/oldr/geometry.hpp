#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oldr/error.hpp"

namespace oldr {

inline constexpr double kSqrt3 = std::numbers::sqrt3;
/// Side length of the embedded triangular lattice.
inline constexpr double kEdge = 4.0 / kSqrt3;
inline constexpr double kHalfEdge = 2.0 / kSqrt3;
/// Horizontal distance between neighbouring vertex columns.
inline constexpr double kColumnPitch = 2.0;
/// Required start/goal separation between disc centres (strict).
inline constexpr double kSeparation = 8.0 / 3.0;
/// Contact distance between two unit discs.
inline constexpr double kContact = 2.0;
inline constexpr double kGeomTol = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Rectangle [0,w] x [0,h] with w = 4 n1 + 2 and h = (4/sqrt3) n2 + 2.
struct Workspace {
  double w = 0.0;
  double h = 0.0;
  int n1 = 0;
  int n2 = 0;

  /// Region available to disc centres (clearance 1 from the boundary).
  bool contains_center(Vec2 p, double tol = kGeomTol) const {
    return p.x >= 1.0 - tol && p.x <= w - 1.0 + tol && p.y >= 1.0 - tol && p.y <= h - 1.0 + tol;
  }
};

inline Workspace build_workspace(int n1, int n2) {
  if (n1 < 2 || n2 < 3) {
    throw Error(ErrorKind::bounds, "workspace requires n1 >= 2 and n2 >= 3 (got n1=" +
                                       std::to_string(n1) + ", n2=" + std::to_string(n2) + ")");
  }
  return Workspace{4.0 * n1 + 2.0, kEdge * n2 + 2.0, n1, n2};
}

/// Lattice coordinates: column k and half-row index m with k = m (mod 2).
/// Position is (1 + 2k, 1 + m * 2/sqrt3).
struct LatticePoint {
  int col = 0;
  int half_row = 0;

  friend constexpr bool operator==(LatticePoint, LatticePoint) = default;
  friend constexpr LatticePoint operator+(LatticePoint a, LatticePoint b) {
    return {a.col + b.col, a.half_row + b.half_row};
  }
  friend constexpr LatticePoint operator-(LatticePoint a, LatticePoint b) {
    return {a.col - b.col, a.half_row - b.half_row};
  }
};

/// The six unit lattice directions in counter-clockwise order, starting at 30 degrees.
inline constexpr std::array<LatticePoint, 6> kDirections{
    {{1, 1}, {0, 2}, {-1, 1}, {-1, -1}, {0, -2}, {1, -1}}};

inline Vec2 lattice_position(LatticePoint p) {
  return {1.0 + kColumnPitch * p.col, 1.0 + kHalfEdge * p.half_row};
}

/// Rotate a lattice vector by `steps` * 60 degrees counter-clockwise.
inline LatticePoint rotate60(LatticePoint d, int steps) {
  // Axial form (q, s) = (col, (half_row - col) / 2); one rotation is (q, s) -> (-s, q + s).
  int q = d.col;
  int s = (d.half_row - d.col) / 2;
  steps = ((steps % 6) + 6) % 6;
  for (int i = 0; i < steps; ++i) {
    const int nq = -s;
    const int ns = q + s;
    q = nq;
    s = ns;
  }
  return {q, 2 * s + q};
}

/// Proper 3-colouring of the lattice; hexagon covers are indexed by centre colour.
inline int lattice_color(LatticePoint p) {
  const int q = p.col;
  const int s = (p.half_row - p.col) / 2;
  return (((q - s) % 3) + 3) % 3;
}

struct Hexagon {
  LatticePoint center;
  int center_id = -1;
  /// Ring vertex ids, counter-clockwise starting at 30 degrees.
  std::array<int, 6> ring{};
  int cover = 0;
};

/// An angle of 60 degrees at `apex` between two grid edges.
struct SharpAngle {
  int apex = 0;
  int arm1 = 0;
  int arm2 = 0;
};

struct HexCovers {
  std::array<std::vector<Hexagon>, 3> covers;
  /// Vertices on no complete hexagon (the degree-2 grid corners).
  std::vector<int> frozen;
};

struct TriGrid {
  Workspace workspace;
  int columns = 0;    // 2 n1 + 1
  int half_rows = 0;  // 2 n2 + 1
  std::vector<Vec2> vertices;
  std::vector<LatticePoint> lattice;
  std::vector<std::vector<int>> adjacency;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::array<int, 3>> triangles;
  HexCovers hex;
  /// Straight vertical columns; together they cover every vertex.
  std::vector<std::vector<int>> vertical_paths;
  /// Horizontal zigzags; they skip the bottom vertex of every even column.
  std::vector<std::vector<int>> zigzag_paths;

  std::size_t size() const { return vertices.size(); }

  int id_at(LatticePoint p) const {
    if (p.col < 0 || p.col >= columns || p.half_row < 0 || p.half_row >= half_rows) return -1;
    return cell_index[static_cast<std::size_t>(p.half_row) * columns + p.col];
  }

  bool adjacent(int a, int b) const {
    const auto& n = adjacency[a];
    return std::binary_search(n.begin(), n.end(), b);
  }

  /// Two distinct edges lie in a common lattice triangle.
  bool share_triangle(int a, int b, int c, int d) const {
    int shared = -1, p = -1, q = -1;
    if (a == c) { shared = a; p = b; q = d; }
    else if (a == d) { shared = a; p = b; q = c; }
    else if (b == c) { shared = b; p = a; q = d; }
    else if (b == d) { shared = b; p = a; q = c; }
    if (shared < 0 || p == q) return false;
    return adjacent(p, q);
  }

  /// Nearest grid vertex, ties broken by smallest id. Constant time: only the
  /// two enclosing columns and two parity-matching half rows in each are probed.
  int nearest_vertex(Vec2 p) const {
    const double u = (p.x - 1.0) / kColumnPitch;
    const int k0 = static_cast<int>(std::floor(u));
    int best = -1;
    double best_d = 0.0;
    for (int k : {k0, k0 + 1}) {
      const int kc = std::clamp(k, 0, columns - 1);
      const double m = (p.y - 1.0) / kHalfEdge;
      int m0 = static_cast<int>(std::floor(m));
      if (((m0 - kc) % 2) != 0) --m0;
      for (int mm : {m0, m0 + 2}) {
        const int mc = std::clamp(mm, kc % 2, half_rows - 1 - kc % 2);
        const int id = id_at({kc, mc});
        if (id < 0) continue;
        const double d = distance(vertices[id], p);
        if (best < 0 || d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && id < best)) {
          best = id;
          best_d = d;
        }
      }
    }
    return best;
  }

  std::vector<int> cell_index;
};

inline HexCovers build_hex_covers(const TriGrid& g) {
  HexCovers out;
  std::vector<char> covered(g.size(), 0);
  for (int m = 0; m < g.half_rows; ++m) {
    for (int k = 0; k < g.columns; ++k) {
      if ((k - m) % 2 != 0) continue;
      const LatticePoint c{k, m};
      Hexagon hx;
      hx.center = c;
      hx.center_id = g.id_at(c);
      bool complete = true;
      for (int d = 0; d < 6; ++d) {
        const int id = g.id_at(c + kDirections[d]);
        if (id < 0) {
          complete = false;
          break;
        }
        hx.ring[d] = id;
      }
      if (!complete) continue;
      hx.cover = lattice_color(c);
      for (int v : hx.ring) covered[v] = 1;
      out.covers[hx.cover].push_back(hx);
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!covered[v]) out.frozen.push_back(static_cast<int>(v));
  return out;
}

inline TriGrid build_grid(const Workspace& ws) {
  TriGrid g;
  g.workspace = ws;
  g.columns = 2 * ws.n1 + 1;
  g.half_rows = 2 * ws.n2 + 1;
  g.cell_index.assign(static_cast<std::size_t>(g.columns) * g.half_rows, -1);
  // Row-major ids: bottom to top, then left to right.
  for (int m = 0; m < g.half_rows; ++m) {
    for (int k = 0; k < g.columns; ++k) {
      if ((k - m) % 2 != 0) continue;
      const LatticePoint lp{k, m};
      const Vec2 pos = lattice_position(lp);
      if (!ws.contains_center(pos)) continue;
      g.cell_index[static_cast<std::size_t>(m) * g.columns + k] = static_cast<int>(g.vertices.size());
      g.vertices.push_back(pos);
      g.lattice.push_back(lp);
    }
  }
  const int n = static_cast<int>(g.vertices.size());
  g.adjacency.resize(n);
  for (int v = 0; v < n; ++v) {
    for (const auto& d : kDirections) {
      const int u = g.id_at(g.lattice[v] + d);
      if (u >= 0) g.adjacency[v].push_back(u);
    }
    std::sort(g.adjacency[v].begin(), g.adjacency[v].end());
  }
  for (int v = 0; v < n; ++v)
    for (int u : g.adjacency[v])
      if (v < u) g.edges.emplace_back(v, u);
  for (int v = 0; v < n; ++v) {
    const auto& nb = g.adjacency[v];
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (nb[i] > v && g.adjacent(nb[i], nb[j])) g.triangles.push_back({v, nb[i], nb[j]});
  }
  g.hex = build_hex_covers(g);

  for (int k = 0; k < g.columns; ++k) {
    std::vector<int> path;
    for (int m = k % 2; m < g.half_rows; m += 2) path.push_back(g.id_at({k, m}));
    g.vertical_paths.push_back(std::move(path));
  }
  for (int j = 1; j <= ws.n2; ++j) {
    std::vector<int> path;
    for (int k = 0; k < g.columns; ++k) path.push_back(g.id_at({k, k % 2 == 0 ? 2 * j : 2 * j - 1}));
    g.zigzag_paths.push_back(std::move(path));
  }
  return g;
}

/// Distance from the centre of a lattice triangle to its corners.
inline constexpr double triangle_circumradius() { return kEdge / kSqrt3; }

/// Fraction of the plane covered by unit discs packed at separation 8/3 on a
/// triangular pattern: half a disc per equilateral triangle of side 8/3.
inline double density_limit() {
  const double disc_share = std::numbers::pi / 2.0;
  const double triangle_area = 0.5 * kSeparation * (4.0 / kSqrt3);
  return disc_share / triangle_area;
}

inline std::vector<SharpAngle> enumerate_sharp_angles(const TriGrid& g) {
  std::vector<SharpAngle> out;
  out.reserve(g.triangles.size() * 3);
  for (const auto& t : g.triangles) {
    out.push_back({t[0], t[1], t[2]});
    out.push_back({t[1], t[0], t[2]});
    out.push_back({t[2], t[0], t[1]});
  }
  return out;
}

/// Angle in degrees at `apex` between the rays to `p` and `q`.
inline double angle_deg(Vec2 apex, Vec2 p, Vec2 q) {
  const Vec2 a = p - apex;
  const Vec2 b = q - apex;
  const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

/// Breadth-first hop distances from `src` over the grid.
inline std::vector<int> bfs_distances(const TriGrid& g, int src) {
  std::vector<int> dist(g.size(), -1);
  std::vector<int> queue{src};
  dist[src] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (int u : g.adjacency[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace oldr
