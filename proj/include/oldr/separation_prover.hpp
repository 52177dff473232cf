#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oldr/geometry.hpp"
#include "oldr/kinematics.hpp"

namespace oldr {

/// Local frame of the sweep: v sits at the origin of an unbounded lattice,
/// w is its 30-degree neighbour and u the neighbour straight above.
struct ProverFrame {
  static Vec2 lattice(LatticePoint p) { return {kColumnPitch * p.col, kHalfEdge * p.half_row}; }
  static Vec2 v() { return {0.0, 0.0}; }
  static Vec2 w() { return lattice({1, 1}); }
  static Vec2 u() { return lattice({0, 2}); }
  /// Centroid of triangle vwu.
  static Vec2 o() { return (1.0 / 3.0) * (v() + w() + u()); }
  /// Midpoint of edge vw.
  static Vec2 x() { return 0.5 * (v() + w()); }
  static std::array<Vec2, 3> region() { return {v(), o(), x()}; }
  static double region_area() {
    const Vec2 a = o() - v();
    const Vec2 b = x() - v();
    return 0.5 * std::abs(a.x * b.y - a.y * b.x);
  }
};

/// All vertices of the unbounded lattice whose distance to `p` is within
/// `tol` of the minimum.
inline std::vector<Vec2> nearest_lattice_vertices(Vec2 p, double tol = kGeomTol) {
  const int k0 = static_cast<int>(std::floor(p.x / kColumnPitch));
  const int m0 = static_cast<int>(std::floor(p.y / kHalfEdge));
  std::vector<Vec2> pts;
  for (int k = k0 - 1; k <= k0 + 2; ++k)
    for (int m = m0 - 2; m <= m0 + 3; ++m)
      if (((k - m) % 2) == 0) pts.push_back(ProverFrame::lattice({k, m}));
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& q : pts) best = std::min(best, distance(p, q));
  std::vector<Vec2> out;
  for (const Vec2& q : pts)
    if (distance(p, q) <= best + tol) out.push_back(q);
  return out;
}

namespace detail {

inline void project(const std::array<Vec2, 4>& pts, Vec2 axis, double& lo, double& hi, int count) {
  lo = hi = pts[0].dot(axis);
  for (int i = 1; i < count; ++i) {
    const double d = pts[i].dot(axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

/// Positive-area overlap between an axis-aligned box and a triangle (separating axes).
inline bool box_overlaps_triangle(Vec2 lo, Vec2 hi, const std::array<Vec2, 3>& tri) {
  const std::array<Vec2, 4> box{lo, Vec2{hi.x, lo.y}, hi, Vec2{lo.x, hi.y}};
  const std::array<Vec2, 4> t4{tri[0], tri[1], tri[2], tri[2]};
  std::array<Vec2, 5> axes{Vec2{1, 0}, Vec2{0, 1}, {}, {}, {}};
  for (int e = 0; e < 3; ++e) {
    const Vec2 d = tri[(e + 1) % 3] - tri[e];
    axes[2 + e] = {-d.y, d.x};
  }
  for (const Vec2& a : axes) {
    double b0, b1, t0, t1;
    project(box, a, b0, b1, 4);
    project(t4, a, t0, t1, 3);
    if (b1 <= t0 + 1e-15 || t1 <= b0 + 1e-15) return false;
  }
  return true;
}

}  // namespace detail

/// Centres of the epsilon-boxes (grid anchored at v) that overlap triangle vox.
inline std::vector<Vec2> enumerate_region_boxes(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::bounds, "epsilon must be positive");
  const auto tri = ProverFrame::region();
  double xmax = 0.0, ymax = 0.0;
  for (const Vec2& p : tri) {
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  const int nx = static_cast<int>(std::ceil(xmax / epsilon));
  const int ny = static_cast<int>(std::ceil(ymax / epsilon));
  std::vector<Vec2> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 lo{i * epsilon, j * epsilon};
      const Vec2 hi{(i + 1) * epsilon, (j + 1) * epsilon};
      if (detail::box_overlaps_triangle(lo, hi, tri)) out.push_back(0.5 * (lo + hi));
    }
  return out;
}

struct AnnulusCell {
  Vec2 s_j;
  std::vector<Vec2> v_j_candidates;
};

inline int annulus_cell_count(double epsilon) {
  const double hw = std::numbers::sqrt2 * epsilon / 2.0;
  return static_cast<int>(
      std::ceil(2.0 * std::numbers::pi * (kSeparation + hw) / (std::numbers::sqrt2 * epsilon)));
}

/// Cells of side sqrt2*eps centred on the circle of radius 8/3 around s_i. A
/// vertex is a candidate when it is nearest (within 1e-9) to some cell corner.
inline std::vector<AnnulusCell> enumerate_annulus_cells(Vec2 s_i, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::bounds, "epsilon must be positive");
  const double hw = std::numbers::sqrt2 * epsilon / 2.0;
  const int K = annulus_cell_count(epsilon);
  std::vector<AnnulusCell> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) {
    const double th = (k + 0.5) * 2.0 * std::numbers::pi / K;
    const Vec2 radial{std::cos(th), std::sin(th)};
    const Vec2 tangent{-radial.y, radial.x};
    AnnulusCell cell;
    cell.s_j = s_i + kSeparation * radial;
    for (int a : {-1, 1})
      for (int b : {-1, 1}) {
        const Vec2 corner = cell.s_j + (a * hw) * radial + (b * hw) * tangent;
        for (const Vec2& q : nearest_lattice_vertices(corner)) {
          if (std::find(cell.v_j_candidates.begin(), cell.v_j_candidates.end(), q) ==
              cell.v_j_candidates.end())
            cell.v_j_candidates.push_back(q);
        }
      }
    out.push_back(std::move(cell));
  }
  return out;
}

struct SweepCase {
  Vec2 s_i;
  Vec2 v_i;
  Vec2 s_j;
  Vec2 v_j;
};

struct Certificate {
  double epsilon = 0.0;
  /// Smallest centre distance over all cases.
  double min_distance = std::numeric_limits<double>::infinity();
  /// min_distance - 2, the clearance above contact.
  double min_delta = std::numeric_limits<double>::infinity();
  SweepCase worst_case;
  std::int64_t case_count = 0;
  std::int64_t box_count = 0;
  int cells_per_box = 0;
  bool pass = false;
};

namespace detail {

struct SweepPartial {
  double min_distance = std::numeric_limits<double>::infinity();
  SweepCase worst;
  std::int64_t cases = 0;
};

inline SweepPartial sweep_boxes(const std::vector<Vec2>& boxes, std::size_t begin, std::size_t end,
                                double epsilon) {
  SweepPartial r;
  const Vec2 v = ProverFrame::v();
  for (std::size_t b = begin; b < end; ++b) {
    const Vec2 s_i = boxes[b];
    for (const AnnulusCell& cell : enumerate_annulus_cells(s_i, epsilon)) {
      for (const Vec2& v_j : cell.v_j_candidates) {
        // Both discs ending on v is impossible for admissible pairs.
        if (v_j == v) continue;
        ++r.cases;
        const double d = min_pair_distance({s_i, v}, {cell.s_j, v_j});
        if (d < r.min_distance) {
          r.min_distance = d;
          r.worst = {s_i, v, cell.s_j, v_j};
        }
      }
    }
  }
  return r;
}

}  // namespace detail

/// Exhaustive sweep over boxes x annulus cells x candidates. The reduction
/// keeps the first minimum in box order, so the result does not depend on
/// `threads`.
inline Certificate verify(double epsilon, unsigned threads = 1) {
  const auto boxes = enumerate_region_boxes(epsilon);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(boxes.size())));
  std::vector<detail::SweepPartial> parts(threads);
  const std::size_t chunk = (boxes.size() + threads - 1) / threads;
  if (threads == 1) {
    parts[0] = detail::sweep_boxes(boxes, 0, boxes.size(), epsilon);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = std::min(boxes.size(), t * chunk);
      const std::size_t e = std::min(boxes.size(), b + chunk);
      pool.emplace_back([&, t, b, e] { parts[t] = detail::sweep_boxes(boxes, b, e, epsilon); });
    }
    for (auto& th : pool) th.join();
  }
  Certificate c;
  c.epsilon = epsilon;
  c.box_count = static_cast<std::int64_t>(boxes.size());
  c.cells_per_box = annulus_cell_count(epsilon);
  for (const auto& p : parts) {
    c.case_count += p.cases;
    if (p.min_distance < c.min_distance) {
      c.min_distance = p.min_distance;
      c.worst_case = p.worst;
    }
  }
  c.min_delta = c.min_distance - kContact;
  c.pass = c.min_delta > 2.0 * epsilon;
  return c;
}

inline std::string format_certificate(const Certificate& c) {
  std::ostringstream os;
  auto g9 = [](double x) {
    std::ostringstream s;
    s << std::setprecision(9) << x;
    return s.str();
  };
  os << "oldr-certificate 1\n";
  os << "epsilon " << g9(c.epsilon) << '\n';
  os << "box_count " << c.box_count << '\n';
  os << "cells_per_box " << c.cells_per_box << '\n';
  os << "case_count " << c.case_count << '\n';
  os << "min_distance " << g9(c.min_distance) << '\n';
  os << "min_delta " << g9(c.min_delta) << '\n';
  os << "threshold " << g9(2.0 * c.epsilon) << '\n';
  const auto& w = c.worst_case;
  os << "worst_s_i " << g9(w.s_i.x) << ' ' << g9(w.s_i.y) << '\n';
  os << "worst_v_i " << g9(w.v_i.x) << ' ' << g9(w.v_i.y) << '\n';
  os << "worst_s_j " << g9(w.s_j.x) << ' ' << g9(w.s_j.y) << '\n';
  os << "worst_v_j " << g9(w.v_j.x) << ' ' << g9(w.v_j.y) << '\n';
  os << "verdict " << (c.pass ? "pass" : "fail") << '\n';
  return os.str();
}

}  // namespace oldr
