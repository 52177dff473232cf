#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "oldr/discretizer.hpp"
#include "oldr/kinematics.hpp"
#include "oldr/plan.hpp"

namespace oldr {

/// Duration of one synchronous grid step: one edge at unit speed.
inline double grid_step_duration() { return 4.0 / std::sqrt(3.0); }

struct Breakpoint {
  double t = 0.0;
  Vec2 p;
};

/// Piecewise-linear trajectory per disc.
struct ContinuousPlan {
  std::vector<std::vector<Breakpoint>> trajectories;
  double makespan = 0.0;
  double snap_in = 0.0;
  double grid = 0.0;
  double snap_out = 0.0;

  std::size_t n() const { return trajectories.size(); }
};

/// Position of a trajectory at time t (clamped to its ends).
inline Vec2 position_at(const std::vector<Breakpoint>& traj, double t) {
  if (t <= traj.front().t) return traj.front().p;
  if (t >= traj.back().t) return traj.back().p;
  auto it = std::upper_bound(traj.begin(), traj.end(), t, [](double x, const Breakpoint& b) { return x < b.t; });
  const Breakpoint& b = *it;
  const Breakpoint& a = *(it - 1);
  const double span = b.t - a.t;
  if (span <= 0.0) return b.p;
  return a.p + ((t - a.t) / span) * (b.p - a.p);
}

namespace detail {

inline void append_grid_phase(ContinuousPlan& cp, const TriGrid& g, const DiscretePlan& plan, double t0) {
  const double e = grid_step_duration();
  for (std::size_t k = 1; k < plan.steps.size(); ++k)
    for (std::size_t r = 0; r < cp.n(); ++r)
      cp.trajectories[r].push_back({t0 + static_cast<double>(k) * e, g.vertices[plan.steps[k][r]]});
}

}  // namespace detail

/// Continuous plan for a discrete plan alone: discs start and end on vertices.
inline ContinuousPlan synthesize_discrete(const TriGrid& g, const DiscretePlan& plan) {
  ContinuousPlan cp;
  if (plan.steps.empty()) return cp;
  cp.trajectories.resize(plan.steps.front().size());
  for (std::size_t r = 0; r < cp.n(); ++r) cp.trajectories[r].push_back({0.0, g.vertices[plan.steps[0][r]]});
  detail::append_grid_phase(cp, g, plan, 0.0);
  cp.grid = plan.makespan() * grid_step_duration();
  cp.makespan = cp.grid;
  return cp;
}

/// Snap-in over d_max of the starts, synchronous grid steps, then the goal
/// snap reversed over d_max of the goals.
inline ContinuousPlan synthesize(const ContinuousInstance& inst, const Discretization& d, const DiscretePlan& plan) {
  if (plan.steps.empty()) throw Error(ErrorKind::validation, "discrete plan has no configurations");
  if (plan.steps.front() != d.start_snap.assignment)
    throw Error(ErrorKind::validation, "discrete plan does not start at the snapped start vertices");
  if (plan.steps.back() != d.goal_snap.assignment)
    throw Error(ErrorKind::validation, "discrete plan does not end at the snapped goal vertices");
  if (inst.starts.size() != plan.steps.front().size())
    throw Error(ErrorKind::validation, "robot count differs between instance and plan");
  const TriGrid& g = *d.instance.grid;
  ContinuousPlan cp;
  cp.snap_in = d.start_snap.phase_duration;
  cp.grid = plan.makespan() * grid_step_duration();
  cp.snap_out = d.goal_snap.phase_duration;
  cp.makespan = cp.snap_in + cp.grid + cp.snap_out;
  cp.trajectories.resize(inst.n());
  for (std::size_t r = 0; r < inst.n(); ++r) {
    cp.trajectories[r].push_back({0.0, inst.starts[r]});
    if (cp.snap_in > 0.0) cp.trajectories[r].push_back({cp.snap_in, g.vertices[plan.steps[0][r]]});
  }
  detail::append_grid_phase(cp, g, plan, cp.snap_in);
  if (cp.snap_out > 0.0)
    for (std::size_t r = 0; r < inst.n(); ++r) cp.trajectories[r].push_back({cp.makespan, inst.goals[r]});
  return cp;
}

struct Violation {
  int a = 0;
  int b = 0;
  double t = 0.0;
  double distance = 0.0;
};

struct ValidationReport {
  /// Exact whenever below the proximity radius (4 plus twice the longest
  /// per-interval displacement); pairs never that close are not compared.
  double min_pair_clearance = std::numeric_limits<double>::infinity();
  std::vector<Violation> violations;  // first kMaxRecorded only
  std::size_t violation_count = 0;
  bool boundary_ok = true;
  bool speed_ok = true;
  bool endpoints_ok = true;
  double max_speed = 0.0;
  double makespan = 0.0;
  std::string first_problem;

  static constexpr std::size_t kMaxRecorded = 64;

  bool valid() const { return violation_count == 0 && boundary_ok && speed_ok && endpoints_ok; }
};

inline constexpr double kClearanceTolerance = 1e-9;
inline constexpr double kSpeedTolerance = 1e-9;

/// Splits every trajectory at the union of breakpoint times and checks each
/// interval exactly: pairwise minimum distance, unit speed, and boundary
/// clearance. Optional endpoint checks compare against given starts/goals.
inline ValidationReport validate(const ContinuousPlan& plan, const Workspace& ws,
                                 const std::vector<Vec2>* starts = nullptr,
                                 const std::vector<Vec2>* goals = nullptr) {
  ValidationReport rep;
  rep.makespan = plan.makespan;
  const std::size_t n = plan.n();
  auto note = [&](const std::string& s) {
    if (rep.first_problem.empty()) rep.first_problem = s;
  };
  for (std::size_t r = 0; r < n; ++r) {
    const auto& tr = plan.trajectories[r];
    if (tr.empty()) {
      rep.endpoints_ok = false;
      note("disc " + std::to_string(r) + " has no trajectory");
      return rep;
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const Vec2 p = tr[k].p;
      if (p.x < 1.0 - kClearanceTolerance || p.x > ws.w - 1.0 + kClearanceTolerance ||
          p.y < 1.0 - kClearanceTolerance || p.y > ws.h - 1.0 + kClearanceTolerance) {
        if (rep.boundary_ok) note("disc " + std::to_string(r) + " leaves the free workspace at t=" + std::to_string(tr[k].t));
        rep.boundary_ok = false;
      }
      if (k == 0) continue;
      const double dt = tr[k].t - tr[k - 1].t;
      const double len = distance(tr[k].p, tr[k - 1].p);
      if (dt < 0.0 || (dt == 0.0 && len > 0.0)) {
        rep.speed_ok = false;
        rep.max_speed = std::numeric_limits<double>::infinity();
        note("disc " + std::to_string(r) + " has non-increasing breakpoint times");
        continue;
      }
      if (dt > 0.0) {
        const double v = len / dt;
        rep.max_speed = std::max(rep.max_speed, v);
        if (v > 1.0 + kSpeedTolerance) {
          if (rep.speed_ok) note("disc " + std::to_string(r) + " exceeds unit speed at t=" + std::to_string(tr[k].t));
          rep.speed_ok = false;
        }
      }
    }
    if (starts && distance(tr.front().p, (*starts)[r]) > 1e-9) {
      rep.endpoints_ok = false;
      note("disc " + std::to_string(r) + " does not start at its start");
    }
    if (goals && distance(tr.back().p, (*goals)[r]) > 1e-9) {
      rep.endpoints_ok = false;
      note("disc " + std::to_string(r) + " does not end at its goal");
    }
  }
  // Union of breakpoint times.
  std::vector<double> times;
  for (const auto& tr : plan.trajectories)
    for (const auto& b : tr) times.push_back(b.t);
  times.push_back(0.0);
  times.push_back(plan.makespan);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return b - a <= 1e-12; }), times.end());
  // Per-disc cursor positions at interval ends.
  std::vector<Vec2> at0(n), at1(n);
  for (std::size_t r = 0; r < n; ++r) at1[r] = position_at(plan.trajectories[r], times.front());
  std::unordered_map<std::int64_t, std::vector<int>> buckets;
  auto check_pair = [&](std::size_t i, std::size_t j, double ta, double tb) {
    const auto m = min_pair_distance_at({at0[i], at1[i]}, {at0[j], at1[j]});
    rep.min_pair_clearance = std::min(rep.min_pair_clearance, m.distance);
    if (m.distance < 2.0 - kClearanceTolerance) {
      if (rep.violations.size() < ValidationReport::kMaxRecorded)
        rep.violations.push_back({static_cast<int>(i), static_cast<int>(j), ta + m.t * (tb - ta), m.distance});
      ++rep.violation_count;
    }
  };
  auto sweep = [&](double ta, double tb) {
    double reach = 0.0;
    for (std::size_t r = 0; r < n; ++r) reach = std::max(reach, distance(at0[r], at1[r]));
    if (n <= 48) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) check_pair(i, j, ta, tb);
      return;
    }
    // Pairs more than `cell` apart at the interval start never come within 4.
    const double cell = 4.0 + 2.0 * reach;
    buckets.clear();
    auto key = [](std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffff); };
    for (std::size_t r = 0; r < n; ++r) {
      const auto cx = static_cast<std::int64_t>(std::floor(at0[r].x / cell));
      const auto cy = static_cast<std::int64_t>(std::floor(at0[r].y / cell));
      buckets[key(cx, cy)].push_back(static_cast<int>(r));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto cx = static_cast<std::int64_t>(std::floor(at0[i].x / cell));
      const auto cy = static_cast<std::int64_t>(std::floor(at0[i].y / cell));
      for (std::int64_t dx = -1; dx <= 1; ++dx)
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          auto it = buckets.find(key(cx + dx, cy + dy));
          if (it == buckets.end()) continue;
          for (int j : it->second)
            if (static_cast<std::size_t>(j) > i) check_pair(i, static_cast<std::size_t>(j), ta, tb);
        }
    }
  };
  if (times.size() == 1) {
    at0 = at1;
    sweep(times.front(), times.front());
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    at0.swap(at1);
    for (std::size_t r = 0; r < n; ++r) at1[r] = position_at(plan.trajectories[r], times[k]);
    sweep(times[k - 1], times[k]);
  }
  if (rep.violation_count > 0 && rep.first_problem.empty()) {
    const auto& v = rep.violations.front();
    note("discs " + std::to_string(v.a) + " and " + std::to_string(v.b) + " are " + std::to_string(v.distance) +
         " apart at t=" + std::to_string(v.t));
  }
  return rep;
}

struct SuiteEntry {
  int makespan = 0;      // achieved steps t_i
  int underestimate = 0;  // t-hat_i
};

struct OptimalityMetrics {
  std::vector<double> per_instance;
  double aggregate = 1.0;
};

/// Sum of makespans over sum of underestimates; zero denominators give 1.
inline OptimalityMetrics optimality_metrics(const std::vector<SuiteEntry>& suite) {
  OptimalityMetrics m;
  long num = 0, den = 0;
  for (const auto& e : suite) {
    m.per_instance.push_back(e.underestimate == 0 ? 1.0 : static_cast<double>(e.makespan) / e.underestimate);
    num += e.makespan;
    den += e.underestimate;
  }
  m.aggregate = den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
  return m;
}

}  // namespace oldr
