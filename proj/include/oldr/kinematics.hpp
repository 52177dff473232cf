#pragma once

#include <algorithm>
#include <cmath>

#include "oldr/geometry.hpp"

namespace oldr {

/// Straight-line motion parameterized on a normalized time t in [0,1].
struct MovingDisc {
  Vec2 from;
  Vec2 to;

  Vec2 at(double t) const { return from + t * (to - from); }
};

struct PairMinimum {
  double distance = 0.0;
  double t = 0.0;
};

/// Exact minimum of |a(t) - b(t)| over t in [0,1]. The squared distance is a
/// quadratic in t, so only the clamped vertex and the endpoints matter.
inline PairMinimum min_pair_distance_at(const MovingDisc& a, const MovingDisc& b) {
  const Vec2 p = a.from - b.from;
  const Vec2 q = (a.to - a.from) - (b.to - b.from);
  const double qq = q.dot(q);
  auto dist_at = [&](double t) { return (p + t * q).norm(); };
  PairMinimum best{dist_at(0.0), 0.0};
  const double d1 = dist_at(1.0);
  if (d1 < best.distance) best = {d1, 1.0};
  if (qq > 0.0) {
    const double tv = std::clamp(-p.dot(q) / qq, 0.0, 1.0);
    const double dv = dist_at(tv);
    if (dv < best.distance) best = {dv, tv};
  }
  return best;
}

inline double min_pair_distance(const MovingDisc& a, const MovingDisc& b) {
  return min_pair_distance_at(a, b).distance;
}

}  // namespace oldr
