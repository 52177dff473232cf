#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "oldr/discretizer.hpp"
#include "oldr/geometry.hpp"

namespace oldr {

/// Points of a triangular pattern with the given pitch inside the centre region,
/// row-major from the bottom-left corner.
inline std::vector<Vec2> triangular_pattern(const Workspace& ws, double pitch) {
  std::vector<Vec2> pts;
  const double row = pitch * kSqrt3 / 2.0;
  for (int r = 0;; ++r) {
    const double y = 1.0 + r * row;
    if (y > ws.h - 1.0 + kGeomTol) break;
    for (int c = 0;; ++c) {
      const double x = 1.0 + c * pitch + (r % 2 ? pitch / 2.0 : 0.0);
      if (x > ws.w - 1.0 + kGeomTol) break;
      pts.push_back({x, y});
    }
  }
  return pts;
}

struct DenseOptions {
  bool strict = true;
  double slack = 1e-6;
};

/// Starts fill the first `count` pattern points; goals are the same points under
/// a random label permutation.
inline ContinuousInstance generate_dense(const Workspace& ws, int count, std::uint64_t seed,
                                         DenseOptions opt = {}) {
  const double pitch = kSeparation + (opt.strict ? opt.slack : 0.0);
  auto pts = triangular_pattern(ws, pitch);
  if (count < 0 || count > static_cast<int>(pts.size()))
    throw Error(ErrorKind::infeasible, "dense pattern holds only " + std::to_string(pts.size()) +
                                           " discs, requested " + std::to_string(count));
  pts.resize(count);
  std::mt19937_64 rng(seed);
  std::vector<int> perm(count);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  ContinuousInstance inst{ws, pts, {}};
  for (int i = 0; i < count; ++i) inst.goals.push_back(pts[perm[i]]);
  return inst;
}

inline std::vector<Vec2> sample_separated(const Workspace& ws, int count, std::mt19937_64& rng,
                                          long budget) {
  std::uniform_real_distribution<double> ux(1.0, ws.w - 1.0), uy(1.0, ws.h - 1.0);
  std::vector<Vec2> pts;
  long attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > budget)
      throw Error(ErrorKind::infeasible, "random placement gave up after " + std::to_string(budget) +
                                             " attempts with " + std::to_string(pts.size()) + " of " +
                                             std::to_string(count) + " discs");
    const Vec2 p{ux(rng), uy(rng)};
    bool ok = true;
    for (const Vec2& q : pts)
      if (!(distance(p, q) > kSeparation)) {
        ok = false;
        break;
      }
    if (ok) pts.push_back(p);
  }
  return pts;
}

/// Rejection sampling of starts and goals at pairwise separation > 8/3.
inline ContinuousInstance generate_random(const Workspace& ws, int count, std::uint64_t seed,
                                          long budget = 200000) {
  std::mt19937_64 rng(seed);
  ContinuousInstance inst{ws, {}, {}};
  inst.starts = sample_separated(ws, count, rng, budget);
  inst.goals = sample_separated(ws, count, rng, budget);
  return inst;
}

/// Random discrete instance with `count` robots on distinct vertices.
inline DiscreteInstance random_discrete(std::shared_ptr<const TriGrid> grid, int count,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> ids(grid->size());
  std::iota(ids.begin(), ids.end(), 0);
  DiscreteInstance inst;
  std::shuffle(ids.begin(), ids.end(), rng);
  inst.starts.assign(ids.begin(), ids.begin() + count);
  std::shuffle(ids.begin(), ids.end(), rng);
  inst.goals.assign(ids.begin(), ids.begin() + count);
  inst.grid = std::move(grid);
  return inst;
}

/// Full occupancy: every vertex holds a robot; corners (frozen vertices) map to
/// themselves and the remaining vertices are permuted at random.
inline DiscreteInstance random_full_occupancy(std::shared_ptr<const TriGrid> grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = static_cast<int>(grid->size());
  std::vector<char> frozen(n, 0);
  for (int f : grid->hex.frozen) frozen[f] = 1;
  std::vector<int> movable;
  for (int v = 0; v < n; ++v)
    if (!frozen[v]) movable.push_back(v);
  std::vector<int> perm = movable;
  std::shuffle(perm.begin(), perm.end(), rng);
  DiscreteInstance inst;
  inst.starts.resize(n);
  std::iota(inst.starts.begin(), inst.starts.end(), 0);
  inst.goals = inst.starts;
  for (std::size_t i = 0; i < movable.size(); ++i) inst.goals[movable[i]] = perm[i];
  inst.grid = std::move(grid);
  return inst;
}

}  // namespace oldr
