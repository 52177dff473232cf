#pragma once

// Joint-state breadth-first search for tiny instances; test-only reference.

#include <functional>
#include <map>
#include <queue>
#include <vector>

#include "oldr/plan.hpp"

namespace oldr::oracle {

/// Optimal makespan by BFS over joint configurations (-1 if unreachable).
inline int joint_bfs_makespan(const DiscreteInstance& inst) {
  const TriGrid& g = *inst.grid;
  const int n = static_cast<int>(inst.n());
  const int nv = static_cast<int>(g.size());
  auto encode = [&](const std::vector<int>& c) {
    long long k = 0;
    for (int v : c) k = k * nv + v;
    return k;
  };
  std::map<long long, int> dist;
  std::queue<std::vector<int>> q;
  dist[encode(inst.starts)] = 0;
  q.push(inst.starts);
  const long long goal = encode(inst.goals);
  std::vector<int> next(n);
  while (!q.empty()) {
    const auto cur = q.front();
    q.pop();
    const int d = dist[encode(cur)];
    if (encode(cur) == goal) return d;
    std::function<void(int)> rec = [&](int r) {
      if (r == n) {
        if (check_step(g, cur, next)) return;
        const long long k = encode(next);
        if (dist.emplace(k, d + 1).second) q.push(next);
        return;
      }
      next[r] = cur[r];
      rec(r + 1);
      for (int u : g.adjacency[cur[r]]) {
        next[r] = u;
        rec(r + 1);
      }
    };
    rec(0);
  }
  return -1;
}

}  // namespace oldr::oracle
