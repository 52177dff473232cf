#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <vector>

#include "oldr/ilp_core.hpp"
#include "oldr/plan.hpp"

namespace oldr {

struct SolveReport {
  int makespan = 0;
  int underestimate = 0;
  double optimality_ratio = 1.0;
  double wall_time = 0.0;  // seconds
  int iterations = 0;
  int split_k = 1;
};

inline double ratio_of(int makespan, int underestimate) {
  if (underestimate == 0) return makespan == 0 ? 1.0 : static_cast<double>(makespan);
  return static_cast<double>(makespan) / underestimate;
}

/// Largest start-goal hop distance, ignoring interactions.
inline int underestimated_makespan(const DiscreteInstance& inst) {
  int best = 0;
  for (std::size_t r = 0; r < inst.n(); ++r) {
    const int d = bfs_distances(*inst.grid, inst.starts[r])[inst.goals[r]];
    if (d < 0) throw Error(ErrorKind::infeasible, "goal of robot " + std::to_string(r) + " is unreachable");
    best = std::max(best, d);
  }
  return best;
}

struct TriIlpOptions {
  Backend backend;
  /// Horizon ceiling; defaults to underestimate + |V|.
  std::optional<int> max_T;
};

struct PlanResult {
  DiscretePlan plan;
  SolveReport report;
};

/// Grows T from the underestimate until every robot reaches its goal.
inline PlanResult solve_triilp(const DiscreteInstance& inst, const TriIlpOptions& opt = {}) {
  check_discrete_instance(inst);
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult out;
  out.report.underestimate = underestimated_makespan(inst);
  if (out.report.underestimate == 0) {
    out.plan = stay_plan(inst.starts);
  } else {
    const int ceiling = opt.max_T.value_or(out.report.underestimate + static_cast<int>(inst.grid->size()));
    for (int T = out.report.underestimate;; ++T) {
      if (T > ceiling)
        throw Error(ErrorKind::solver, "horizon ceiling " + std::to_string(ceiling) + " exceeded");
      ++out.report.iterations;
      const auto model = build_model(inst, T);
      const auto sol = solve(model, inst, opt.backend);
      if (sol.objective == static_cast<int>(inst.n())) {
        out.plan = decode(model, inst, sol);
        break;
      }
    }
  }
  out.report.makespan = out.plan.makespan();
  out.report.optimality_ratio = ratio_of(out.report.makespan, out.report.underestimate);
  out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (auto err = check_plan(inst, out.plan)) throw Error(ErrorKind::internal, "decoded plan invalid: " + *err);
  return out;
}

/// Deterministic BFS shortest path (parents chosen by lowest id).
inline std::vector<int> shortest_path(const TriGrid& g, int from, int to) {
  const auto dist = bfs_distances(g, to);
  if (dist[from] < 0) throw Error(ErrorKind::infeasible, "no path between vertices");
  std::vector<int> path{from};
  for (int v = from; v != to;) {
    for (int u : g.adjacency[v])
      if (dist[u] == dist[v] - 1) {
        v = u;
        break;
      }
    path.push_back(v);
  }
  return path;
}

/// Nearest vertex (BFS order, lowest id first) not in `taken`.
inline int nearest_free_vertex(const TriGrid& g, int from, const std::vector<char>& taken) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> layer{from};
  seen[from] = 1;
  while (!layer.empty()) {
    std::vector<int> sorted = layer;
    std::sort(sorted.begin(), sorted.end());
    for (int v : sorted)
      if (!taken[v]) return v;
    std::vector<int> next;
    for (int v : sorted)
      for (int u : g.adjacency[v])
        if (!seen[u]) {
          seen[u] = 1;
          next.push_back(u);
        }
    layer = std::move(next);
  }
  throw Error(ErrorKind::infeasible, "no unoccupied vertex left for relocation");
}

/// k sub-instances chained through k-1 intermediate configurations taken at
/// fractions m/k along each robot's shortest path.
inline std::vector<DiscreteInstance> split_k_way(const DiscreteInstance& inst, int k) {
  if (k < 2) throw Error(ErrorKind::bounds, "split requires k >= 2");
  check_discrete_instance(inst);
  const TriGrid& g = *inst.grid;
  const std::size_t n = inst.n();
  std::vector<std::vector<int>> paths;
  for (std::size_t r = 0; r < n; ++r) paths.push_back(shortest_path(g, inst.starts[r], inst.goals[r]));
  std::vector<std::vector<int>> configs{inst.starts};
  for (int m = 1; m < k; ++m) {
    std::vector<int> cfg(n);
    std::vector<char> taken(g.size(), 0);
    for (std::size_t r = 0; r < n; ++r) {
      const int d = static_cast<int>(paths[r].size()) - 1;
      int v = paths[r][static_cast<std::size_t>(m) * d / k];
      if (taken[v]) v = nearest_free_vertex(g, v, taken);
      taken[v] = 1;
      cfg[r] = v;
    }
    configs.push_back(std::move(cfg));
  }
  configs.push_back(inst.goals);
  std::vector<DiscreteInstance> out;
  for (int m = 0; m < k; ++m) out.push_back({inst.grid, configs[m], configs[m + 1]});
  return out;
}

/// Solves the chained sub-instances in order and concatenates their plans.
inline PlanResult solve_split(const DiscreteInstance& inst, int k, const TriIlpOptions& opt = {}) {
  if (k < 1) throw Error(ErrorKind::bounds, "split requires k >= 1");
  if (k == 1) return solve_triilp(inst, opt);
  const auto t0 = std::chrono::steady_clock::now();
  PlanResult out;
  out.report.split_k = k;
  out.report.underestimate = underestimated_makespan(inst);
  out.plan = stay_plan(inst.starts);
  for (const auto& sub : split_k_way(inst, k)) {
    const auto part = solve_triilp(sub, opt);
    append_plan(out.plan, part.plan);
    out.report.iterations += part.report.iterations;
  }
  out.report.makespan = out.plan.makespan();
  out.report.optimality_ratio = ratio_of(out.report.makespan, out.report.underestimate);
  out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (auto err = check_plan(inst, out.plan)) throw Error(ErrorKind::internal, "split plan invalid: " + *err);
  return out;
}

}  // namespace oldr
