#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oldr/discretizer.hpp"

namespace oldr {

/// steps[t][r] is the vertex of robot r after t synchronous steps.
struct DiscretePlan {
  std::vector<std::vector<int>> steps;

  int makespan() const { return steps.empty() ? 0 : static_cast<int>(steps.size()) - 1; }
};

/// A plan that keeps every robot at its start.
inline DiscretePlan stay_plan(const std::vector<int>& starts) { return {{starts}}; }

/// Checks one synchronous transition; returns an explanation on failure.
inline std::optional<std::string> check_step(const TriGrid& g, const std::vector<int>& from,
                                             const std::vector<int>& to) {
  const std::size_t n = from.size();
  if (to.size() != n) return "robot count changes between steps";
  std::vector<int> owner(g.size(), -1);
  for (std::size_t r = 0; r < n; ++r) {
    const int a = from[r], b = to[r];
    if (b < 0 || b >= static_cast<int>(g.size())) return "vertex id out of range";
    if (a != b && !g.adjacent(a, b))
      return "robot " + std::to_string(r) + " jumps " + std::to_string(a) + "->" + std::to_string(b);
    if (owner[b] >= 0) return "vertex " + std::to_string(b) + " occupied twice";
    owner[b] = static_cast<int>(r);
  }
  // Movers only; concurrency checks are local to the neighbourhood of each move.
  std::vector<int> mover_from(g.size(), -1);
  for (std::size_t r = 0; r < n; ++r)
    if (from[r] != to[r]) mover_from[from[r]] = static_cast<int>(r);
  for (std::size_t r = 0; r < n; ++r) {
    const int a = from[r], b = to[r];
    if (a == b) continue;
    // Any other mover touching a or b, or starting next to both, is a candidate.
    for (int x : {a, b}) {
      for (int c : g.adjacency[x]) {
        const int s = mover_from[c];
        if (s < 0 || s == static_cast<int>(r)) continue;
        const int d = to[s];
        if (c == b && d == a) return "head-on exchange on edge " + std::to_string(a) + "-" + std::to_string(b);
        if (g.share_triangle(a, b, c, d))
          return "robots " + std::to_string(r) + " and " + std::to_string(s) + " move within one triangle";
      }
      const int s = mover_from[x];
      if (s >= 0 && s != static_cast<int>(r)) {
        const int d = to[s];
        if (g.share_triangle(a, b, x, d))
          return "robots " + std::to_string(r) + " and " + std::to_string(s) + " move within one triangle";
      }
    }
  }
  return std::nullopt;
}

/// Full validity: endpoints, adjacency, injectivity, no head-on swaps and no two
/// moves inside a common triangle in any step.
inline std::optional<std::string> check_plan(const DiscreteInstance& inst, const DiscretePlan& plan) {
  if (plan.steps.empty()) return "plan has no steps";
  if (plan.steps.front() != inst.starts) return "first configuration differs from starts";
  if (plan.steps.back() != inst.goals) return "last configuration differs from goals";
  for (std::size_t t = 0; t + 1 < plan.steps.size(); ++t)
    if (auto err = check_step(*inst.grid, plan.steps[t], plan.steps[t + 1]))
      return "step " + std::to_string(t) + ": " + *err;
  return std::nullopt;
}

inline bool is_valid_plan(const DiscreteInstance& inst, const DiscretePlan& plan) {
  return !check_plan(inst, plan).has_value();
}

/// Appends `tail` (whose first configuration equals the last one of `head`).
inline void append_plan(DiscretePlan& head, const DiscretePlan& tail) {
  if (head.steps.empty()) {
    head = tail;
    return;
  }
  for (std::size_t t = 1; t < tail.steps.size(); ++t) head.steps.push_back(tail.steps[t]);
}

}  // namespace oldr
