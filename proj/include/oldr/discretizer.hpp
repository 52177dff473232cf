#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "oldr/geometry.hpp"
#include "oldr/kinematics.hpp"

namespace oldr {

struct ContinuousInstance {
  Workspace workspace;
  std::vector<Vec2> starts;
  std::vector<Vec2> goals;

  std::size_t n() const { return starts.size(); }
};

struct SeparationViolation {
  int i = 0;
  int j = 0;
  double distance = 0.0;
};

struct SeparationReport {
  std::vector<SeparationViolation> starts;
  std::vector<SeparationViolation> goals;
  /// Indices of points closer than 1 to the workspace boundary.
  std::vector<int> starts_out_of_bounds;
  std::vector<int> goals_out_of_bounds;
  bool size_mismatch = false;

  bool ok() const {
    return starts.empty() && goals.empty() && starts_out_of_bounds.empty() &&
           goals_out_of_bounds.empty() && !size_mismatch;
  }
};

namespace detail {

inline std::vector<SeparationViolation> pair_violations(const std::vector<Vec2>& pts) {
  std::vector<SeparationViolation> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = distance(pts[i], pts[j]);
      if (!(d > kSeparation)) out.push_back({static_cast<int>(i), static_cast<int>(j), d});
    }
  return out;
}

inline std::vector<int> out_of_bounds(const Workspace& ws, const std::vector<Vec2>& pts) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!ws.contains_center(pts[i])) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace detail

/// Lists every pair at distance <= 8/3 and every point violating the boundary clearance.
inline SeparationReport validate_separation(const ContinuousInstance& inst) {
  SeparationReport r;
  r.size_mismatch = inst.starts.size() != inst.goals.size();
  r.starts = detail::pair_violations(inst.starts);
  r.goals = detail::pair_violations(inst.goals);
  r.starts_out_of_bounds = detail::out_of_bounds(inst.workspace, inst.starts);
  r.goals_out_of_bounds = detail::out_of_bounds(inst.workspace, inst.goals);
  return r;
}

enum class Side { starts, goals };

struct SnapResult {
  std::vector<int> assignment;
  double d_max = 0.0;
  double phase_duration = 0.0;
  /// Point -> vertex, traversed at constant speed over phase_duration.
  std::vector<std::pair<Vec2, Vec2>> straight_segments;

  /// Speed of disc i during the phase (0 when the phase is empty).
  double speed(std::size_t i) const {
    if (phase_duration <= 0.0) return 0.0;
    return distance(straight_segments[i].first, straight_segments[i].second) / phase_duration;
  }
};

inline SnapResult snap(const ContinuousInstance& inst, const TriGrid& grid, Side which) {
  const auto& pts = which == Side::starts ? inst.starts : inst.goals;
  SnapResult out;
  out.assignment.reserve(pts.size());
  out.straight_segments.reserve(pts.size());
  std::unordered_set<int> used;
  used.reserve(pts.size() * 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int v = grid.nearest_vertex(pts[i]);
    if (!used.insert(v).second) {
      throw Error(ErrorKind::internal, "snap is not injective: disc " + std::to_string(i) +
                                           " maps to occupied vertex " + std::to_string(v));
    }
    const Vec2 target = grid.vertices[v];
    out.assignment.push_back(v);
    out.straight_segments.emplace_back(pts[i], target);
    out.d_max = std::max(out.d_max, distance(pts[i], target));
  }
  out.phase_duration = out.d_max;
  return out;
}

struct DiscreteInstance {
  std::shared_ptr<const TriGrid> grid;
  std::vector<int> starts;
  std::vector<int> goals;

  std::size_t n() const { return starts.size(); }
};

/// Throws ErrorKind::inadmissible unless both sides are injective and in range.
inline void check_discrete_instance(const DiscreteInstance& inst) {
  if (!inst.grid) throw Error(ErrorKind::inadmissible, "instance has no grid");
  if (inst.starts.size() != inst.goals.size())
    throw Error(ErrorKind::inadmissible, "start and goal counts differ");
  const int nv = static_cast<int>(inst.grid->size());
  for (const auto* side : {&inst.starts, &inst.goals}) {
    std::vector<char> seen(nv, 0);
    for (int v : *side) {
      if (v < 0 || v >= nv) throw Error(ErrorKind::inadmissible, "vertex id out of range");
      if (seen[v]) throw Error(ErrorKind::inadmissible, "duplicate start or goal vertex");
      seen[v] = 1;
    }
  }
}

struct Discretization {
  DiscreteInstance instance;
  SnapResult start_snap;
  SnapResult goal_snap;
};

inline Discretization discretize(const ContinuousInstance& inst, std::shared_ptr<const TriGrid> grid) {
  if (inst.starts.size() != inst.goals.size())
    throw Error(ErrorKind::inadmissible, "start and goal counts differ");
  Discretization d;
  d.start_snap = snap(inst, *grid, Side::starts);
  d.goal_snap = snap(inst, *grid, Side::goals);
  d.instance.grid = std::move(grid);
  d.instance.starts = d.start_snap.assignment;
  d.instance.goals = d.goal_snap.assignment;
  return d;
}

/// Minimum centre distance over all pairs during a snap phase (synchronized motion).
inline double snap_phase_clearance(const SnapResult& s) {
  double best = std::numeric_limits<double>::infinity();
  const auto& seg = s.straight_segments;
  for (std::size_t i = 0; i < seg.size(); ++i)
    for (std::size_t j = i + 1; j < seg.size(); ++j)
      best = std::min(best, min_pair_distance({seg[i].first, seg[i].second},
                                              {seg[j].first, seg[j].second}));
  return best;
}

}  // namespace oldr
