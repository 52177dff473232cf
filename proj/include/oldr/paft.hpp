#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/edmonds_karp_max_flow.hpp>

#include "oldr/plan.hpp"
#include "oldr/swap.hpp"
#include "oldr/triilp.hpp"

namespace oldr {

/// Matrix coordinates of a vertex: column k, row j (odd columns start at j = 1).
struct Cell {
  int k = 0;
  int j = 0;
};

inline Cell cell_of(const TriGrid& g, int v) {
  const auto& p = g.lattice[v];
  return {p.col, (p.half_row + (p.col & 1)) / 2};
}

inline int vertex_at_cell(const TriGrid& g, int k, int j) {
  return g.id_at({k, (k & 1) ? 2 * j - 1 : 2 * j});
}

/// Inclusive rectangle in matrix coordinates.
struct CellRect {
  int k0 = 0, k1 = 0, j0 = 0, j1 = 0;
};

namespace detail {

/// Bipartite transport with unit edge capacities: left l ships supply[l]
/// units, right r receives demand[r], edges where allowed(l, r). Returns the
/// chosen right indices per left node, or nullopt when infeasible.
template <class Allowed>
std::optional<std::vector<std::vector<int>>> unit_transport(const std::vector<int>& supply,
                                                             const std::vector<int>& demand, Allowed allowed) {
  using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
  using Graph = boost::adjacency_list<
      boost::vecS, boost::vecS, boost::directedS, boost::no_property,
      boost::property<boost::edge_capacity_t, long,
                      boost::property<boost::edge_residual_capacity_t, long,
                                      boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;
  const int L = static_cast<int>(supply.size()), R = static_cast<int>(demand.size());
  Graph G(L + R + 2);
  const int src = L + R, dst = L + R + 1;
  auto cap = boost::get(boost::edge_capacity, G);
  auto rev = boost::get(boost::edge_reverse, G);
  auto res = boost::get(boost::edge_residual_capacity, G);
  auto add = [&](int a, int b, long c) {
    auto e = boost::add_edge(a, b, G).first;
    auto r = boost::add_edge(b, a, G).first;
    cap[e] = c;
    cap[r] = 0;
    rev[e] = r;
    rev[r] = e;
    return e;
  };
  long total = 0;
  for (int l = 0; l < L; ++l) {
    add(src, l, supply[l]);
    total += supply[l];
  }
  long need = 0;
  for (int r = 0; r < R; ++r) {
    add(L + r, dst, demand[r]);
    need += demand[r];
  }
  if (total != need) return std::nullopt;
  std::vector<std::pair<Traits::edge_descriptor, std::pair<int, int>>> mid;
  for (int l = 0; l < L; ++l)
    for (int r = 0; r < R; ++r)
      if (allowed(l, r)) mid.push_back({add(l, L + r, 1), {l, r}});
  if (boost::edmonds_karp_max_flow(G, src, dst) != total) return std::nullopt;
  std::vector<std::vector<int>> out(L);
  for (const auto& [e, lr] : mid)
    if (cap[e] - res[e] > 0) out[lr.first].push_back(lr.second);
  return out;
}

}  // namespace detail

/// Full-occupancy swap router over the non-frozen vertices. Discs 0..n-1 are
/// real robots, the rest are virtual fillers that are never reported.
class SwapRouter {
 public:
  SwapRouter(const TriGrid& g, const std::vector<int>& real_positions) : g_(g), engine_(g) {
    const int n = static_cast<int>(real_positions.size());
    n_real_ = n;
    occ_.assign(g.size(), -1);
    pos_ = real_positions;
    for (int r = 0; r < n; ++r) occ_[pos_[r]] = r;
    for (std::size_t v = 0; v < g.size(); ++v)
      if (!engine_.frozen(static_cast<int>(v)) && occ_[v] < 0) {
        occ_[v] = static_cast<int>(pos_.size());
        pos_.push_back(static_cast<int>(v));
      }
    stamp_.assign(g.size(), 0);
    steps_.push_back(real_positions);
  }

  const TriGrid& grid() const { return g_; }
  const SwapEngine& engine() const { return engine_; }
  int real_count() const { return n_real_; }
  int disc_count() const { return static_cast<int>(pos_.size()); }
  bool is_virtual(int d) const { return d >= n_real_; }
  int position(int d) const { return pos_[d]; }
  int occupant(int v) const { return occ_[v]; }
  const std::vector<std::vector<int>>& steps() const { return steps_; }
  int max_swap_length() const { return max_swap_len_; }
  long swap_count() const { return swap_count_; }

  /// Executes exchanges of the discs on each vertex pair. Exchanges between
  /// two virtual discs only relabel them; the rest run in footprint-disjoint
  /// batches, programs within a batch advancing in lockstep.
  void exchange(const std::vector<std::pair<int, int>>& requests) {
    std::vector<std::pair<int, int>> pending;
    for (auto [u, v] : requests) {
      if (is_virtual(occ_[u]) && is_virtual(occ_[v])) {
        std::swap(occ_[u], occ_[v]);
        pos_[occ_[u]] = u;
        pos_[occ_[v]] = v;
      } else {
        pending.emplace_back(u, v);
      }
    }
    while (!pending.empty()) {
      ++stamp_id_;
      std::vector<const SwapProgram*> batch;
      std::vector<std::pair<int, int>> later;
      for (auto [u, v] : pending) {
        const SwapProgram* pick = nullptr;
        for (const auto& prog : programs_for(u, v)) {
          bool free = true;
          for (int x : prog.footprint)
            if (stamp_[x] == stamp_id_) {
              free = false;
              break;
            }
          if (free) {
            pick = &prog;
            break;
          }
        }
        if (!pick) {
          later.emplace_back(u, v);
          continue;
        }
        for (int x : pick->footprint) stamp_[x] = stamp_id_;
        batch.push_back(pick);
      }
      std::size_t len = 0;
      for (const auto* p : batch) {
        len = std::max(len, p->steps.size());
        max_swap_len_ = std::max(max_swap_len_, static_cast<int>(p->steps.size()));
      }
      swap_count_ += static_cast<long>(batch.size());
      for (std::size_t t = 0; t < len; ++t) {
        bool real_moved = false;
        for (const auto* p : batch) {
          if (t >= p->steps.size()) continue;
          const auto& rot = p->steps[t];
          apply_rotation(occ_, rot);
          for (int x : rot.ring) {
            pos_[occ_[x]] = x;
            real_moved = real_moved || !is_virtual(occ_[x]);
          }
        }
        if (real_moved) steps_.emplace_back(pos_.begin(), pos_.begin() + n_real_);
      }
      pending = std::move(later);
    }
  }

  /// Concurrent odd-even transposition sort of disjoint vertex lines by
  /// rank[disc]; ranks must be distinct within each line.
  void sort_lines(const std::vector<std::vector<int>>& lines, const std::vector<int>& rank) {
    for (int quiet = 0, parity = 0; quiet < 2; parity ^= 1) {
      std::vector<std::pair<int, int>> req;
      for (const auto& line : lines)
        for (std::size_t i = parity; i + 1 < line.size(); i += 2)
          if (rank[occ_[line[i]]] > rank[occ_[line[i + 1]]]) req.emplace_back(line[i], line[i + 1]);
      quiet = req.empty() ? quiet + 1 : 0;
      exchange(req);
    }
  }

  /// Routes every disc to target[disc] with recursive bisection of each
  /// region; all regions of one level run concurrently. Each region must
  /// contain the targets of exactly the discs inside it. `levels` < 0 recurses
  /// to single cells.
  void split_and_group(std::vector<CellRect> regions, const std::vector<int>& target, int levels = -1) {
    std::vector<int> rank(pos_.size(), 0);
    auto set_ranks = [&](const std::vector<int>& order) {
      for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    };
    struct Split {
      bool by_column;
      int mid;
      std::vector<std::vector<int>> b_lines;
    };
    for (int level = 0; !regions.empty() && level != levels; ++level) {
      std::vector<std::vector<int>> phase_a;
      std::vector<Split> splits;
      std::vector<CellRect> next;
      for (const auto& R : regions) {
        if (cell_count(R) <= 1) continue;
        const bool by_column = (R.k1 - R.k0) >= (R.j1 - R.j0);
        const int mid = by_column ? (R.k0 + R.k1) / 2 : (R.j0 + R.j1) / 2;
        auto far_side = [&](int v) {
          const Cell c = cell_of(g_, v);
          return by_column ? c.k > mid : c.j > mid;
        };
        // Phase A lines run parallel to the split line, phase B lines across it.
        auto a_lines = by_column ? columns_of(R) : rows_of(R);
        auto b_lines = by_column ? rows_of(R) : columns_of(R);
        std::vector<int> supply, demand;
        for (const auto& line : a_lines) {
          int c = 0;
          for (int v : line) c += far_side(target[occ_[v]]);
          supply.push_back(c);
        }
        for (const auto& line : b_lines) {
          int q = 0;
          for (int v : line) q += far_side(v);
          demand.push_back(q);
        }
        auto meet = [&](int a, int b) {
          const Cell ca = cell_of(g_, a_lines[a].front()), cb = cell_of(g_, b_lines[b].front());
          return by_column ? vertex_at_cell_in(R, ca.k, cb.j) : vertex_at_cell_in(R, cb.k, ca.j);
        };
        const auto flow = detail::unit_transport(supply, demand, [&](int a, int b) { return meet(a, b) >= 0; });
        if (!flow) {
          ++fallback_sorts_;
          std::vector<int> line;
          for (int j = R.j0; j <= R.j1; ++j) {
            std::vector<int> row;
            for (int k = R.k0; k <= R.k1; ++k)
              if (int v = vertex_at_cell_in(R, k, j); v >= 0) row.push_back(v);
            if ((j - R.j0) % 2) std::reverse(row.begin(), row.end());
            line.insert(line.end(), row.begin(), row.end());
          }
          std::unordered_map<int, int> index_of;
          for (std::size_t i = 0; i < line.size(); ++i) index_of[line[i]] = static_cast<int>(i);
          std::vector<int> order(line.size());
          for (int v : line) order[index_of.at(target[occ_[v]])] = occ_[v];
          set_ranks(order);
          phase_a.push_back(std::move(line));
          continue;
        }
        // Far-bound discs of each A line move into the slots the flow picked.
        for (std::size_t a = 0; a < a_lines.size(); ++a) {
          const auto& line = a_lines[a];
          std::vector<char> slot_far(line.size(), 0);
          for (int b : (*flow)[a]) {
            const int v = meet(static_cast<int>(a), b);
            slot_far[std::find(line.begin(), line.end(), v) - line.begin()] = 1;
          }
          std::vector<int> far, near;
          for (int v : line) (far_side(target[occ_[v]]) ? far : near).push_back(occ_[v]);
          std::vector<int> order(line.size());
          std::size_t fi = 0, ni = 0;
          for (std::size_t i = 0; i < line.size(); ++i) order[i] = slot_far[i] ? far[fi++] : near[ni++];
          set_ranks(order);
          phase_a.push_back(line);
        }
        splits.push_back({by_column, mid, std::move(b_lines)});
        CellRect lo = R, hi = R;
        (by_column ? lo.k1 : lo.j1) = mid;
        (by_column ? hi.k0 : hi.j0) = mid + 1;
        for (const auto& child : {lo, hi})
          if (cell_count(child) > 1) next.push_back(child);
      }
      sort_lines(phase_a, rank);
      // Phase B: far-bound discs slide to the far end of each line, stably.
      std::vector<std::vector<int>> phase_b;
      for (auto& sp : splits)
        for (auto& line : sp.b_lines) {
          std::vector<int> order;
          for (int pass = 0; pass < 2; ++pass)
            for (int v : line) {
              const Cell t = cell_of(g_, target[occ_[v]]);
              if ((sp.by_column ? t.k > sp.mid : t.j > sp.mid) == (pass == 1)) order.push_back(occ_[v]);
            }
          set_ranks(order);
          phase_b.push_back(std::move(line));
        }
      sort_lines(phase_b, rank);
      regions = std::move(next);
    }
  }

  int fallback_sorts() const { return fallback_sorts_; }

 private:
  const std::vector<SwapProgram>& programs_for(int u, int v) {
    if (u > v) std::swap(u, v);
    const auto key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<SwapProgram> progs;
    for (int r : engine_.common_regions(u, v)) progs.push_back(engine_.region_program(r, u, v));
    if (progs.empty()) progs.push_back(engine_.program(u, v));
    return cache_.emplace(key, std::move(progs)).first->second;
  }

  int vertex_at_cell_in(const CellRect& R, int k, int j) const {
    if (k < R.k0 || k > R.k1 || j < R.j0 || j > R.j1) return -1;
    const int v = vertex_at_cell(g_, k, j);
    return (v >= 0 && !engine_.frozen(v)) ? v : -1;
  }

  int cell_count(const CellRect& R) const {
    int c = 0;
    for (int k = R.k0; k <= R.k1; ++k)
      for (int j = R.j0; j <= R.j1; ++j) c += vertex_at_cell_in(R, k, j) >= 0;
    return c;
  }

  std::vector<std::vector<int>> columns_of(const CellRect& R) const {
    std::vector<std::vector<int>> out;
    for (int k = R.k0; k <= R.k1; ++k) {
      std::vector<int> line;
      for (int j = R.j0; j <= R.j1; ++j)
        if (int v = vertex_at_cell_in(R, k, j); v >= 0) line.push_back(v);
      if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
  }

  std::vector<std::vector<int>> rows_of(const CellRect& R) const {
    std::vector<std::vector<int>> out;
    for (int j = R.j0; j <= R.j1; ++j) {
      std::vector<int> line;
      for (int k = R.k0; k <= R.k1; ++k)
        if (int v = vertex_at_cell_in(R, k, j); v >= 0) line.push_back(v);
      if (!line.empty()) out.push_back(std::move(line));
    }
    return out;
  }

  const TriGrid& g_;
  SwapEngine engine_;
  int n_real_ = 0;
  std::vector<int> occ_;  // disc per vertex, -1 on frozen vertices
  std::vector<int> pos_;  // vertex per disc
  std::vector<unsigned> stamp_;
  unsigned stamp_id_ = 0;
  std::vector<std::vector<int>> steps_;
  std::unordered_map<std::uint64_t, std::vector<SwapProgram>> cache_;
  int fallback_sorts_ = 0;
  int max_swap_len_ = 0;
  long swap_count_ = 0;
};

/// Moves robots off degree-2 corners before routing on the remaining
/// vertices, and the mirror image for goals.
struct CornerPhases {
  std::vector<std::vector<int>> pre;   // configurations after each pre step
  std::vector<std::vector<int>> post;  // configurations after each post step, ending at the goals
  std::vector<int> inner_starts;
  std::vector<int> inner_goals;
};

namespace detail {

/// Shifts the robot on each listed corner one hop along a shortest path to
/// the nearest vacancy among non-frozen vertices; returns the configurations.
inline std::vector<std::vector<int>> evacuate_corners(const TriGrid& g, std::vector<int>& config,
                                                      const std::vector<char>& frozen,
                                                      const std::vector<int>& corners) {
  std::vector<std::vector<int>> out;
  std::vector<int> owner(g.size(), -1);
  for (std::size_t r = 0; r < config.size(); ++r) owner[config[r]] = static_cast<int>(r);
  for (int c : corners) {
    std::vector<int> parent(g.size(), -1);
    std::vector<int> queue{c};
    parent[c] = c;
    int hole = -1;
    for (std::size_t h = 0; h < queue.size() && hole < 0; ++h)
      for (int y : g.adjacency[queue[h]])
        if (parent[y] < 0 && !frozen[y]) {
          parent[y] = queue[h];
          if (owner[y] < 0) {
            hole = y;
            break;
          }
          queue.push_back(y);
        }
    if (hole < 0)
      throw Error(ErrorKind::infeasible, "robot on corner " + std::to_string(c) +
                                             " cannot leave: no empty non-corner vertex");
    // Shift the chain hole <- ... <- c in one step.
    for (int v = hole; v != c; v = parent[v]) {
      const int r = owner[parent[v]];
      config[r] = v;
      owner[v] = r;
    }
    owner[c] = -1;
    out.push_back(config);
  }
  return out;
}

}  // namespace detail

inline CornerPhases plan_corner_phases(const DiscreteInstance& inst) {
  const TriGrid& g = *inst.grid;
  std::vector<char> frozen(g.size(), 0);
  for (int f : g.hex.frozen) frozen[f] = 1;
  CornerPhases out;
  out.inner_starts = inst.starts;
  out.inner_goals = inst.goals;
  std::vector<int> start_corners, goal_corners;
  for (std::size_t r = 0; r < inst.n(); ++r) {
    if (inst.starts[r] == inst.goals[r]) continue;  // corner robots at home stay put
    if (frozen[inst.starts[r]]) start_corners.push_back(inst.starts[r]);
    if (frozen[inst.goals[r]]) goal_corners.push_back(inst.goals[r]);
  }
  std::sort(start_corners.begin(), start_corners.end());
  std::sort(goal_corners.begin(), goal_corners.end());
  out.pre = detail::evacuate_corners(g, out.inner_starts, frozen, start_corners);
  auto back = detail::evacuate_corners(g, out.inner_goals, frozen, goal_corners);
  // Replay the goal-side evacuation backwards.
  for (std::size_t i = back.size(); i-- > 1;) out.post.push_back(back[i - 1]);
  if (!back.empty()) out.post.push_back(inst.goals);
  return out;
}

/// Target vertex per router disc: real robots get their goals, virtual discs
/// fill the remaining vertices, staying put where possible.
inline std::vector<int> virtual_targets(const SwapRouter& router, const std::vector<int>& real_goals) {
  const TriGrid& g = router.grid();
  std::vector<int> target(router.disc_count(), -1);
  std::vector<char> taken(g.size(), 0);
  for (int r = 0; r < router.real_count(); ++r) {
    target[r] = real_goals[r];
    taken[real_goals[r]] = 1;
  }
  std::vector<int> free_vertices, movers;
  for (int d = router.real_count(); d < router.disc_count(); ++d) {
    const int v = router.position(d);
    if (!taken[v]) {
      target[d] = v;
      taken[v] = 1;
    } else {
      movers.push_back(d);
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    if (!taken[v] && !router.engine().frozen(static_cast<int>(v))) free_vertices.push_back(static_cast<int>(v));
  for (std::size_t i = 0; i < movers.size(); ++i) target[movers[i]] = free_vertices[i];
  return target;
}

inline CellRect whole_grid_rect(const TriGrid& g) { return {0, g.columns - 1, 0, (g.half_rows - 1) / 2}; }

namespace detail {

inline void check_routable(const DiscreteInstance& inst) {
  check_discrete_instance(inst);
  const TriGrid& g = *inst.grid;
  if (g.workspace.n1 < 2 || g.workspace.n2 < 3)
    throw Error(ErrorKind::bounds, "swap routing needs n1 >= 2 and n2 >= 3");
  std::vector<char> frozen(g.size(), 0);
  for (int f : g.hex.frozen) frozen[f] = 1;
  std::size_t inner = 0;
  bool corner_moves = false;
  for (std::size_t r = 0; r < inst.n(); ++r) {
    inner += !frozen[inst.starts[r]];
    corner_moves = corner_moves || ((frozen[inst.starts[r]] || frozen[inst.goals[r]]) && inst.starts[r] != inst.goals[r]);
  }
  if (corner_moves && inner >= g.size() - g.hex.frozen.size())
    throw Error(ErrorKind::infeasible, "a corner robot must move but every non-corner vertex is occupied");
}

inline DiscretePlan assemble(const DiscreteInstance& inst, const CornerPhases& cp, const SwapRouter& router) {
  DiscretePlan plan = stay_plan(inst.starts);
  for (const auto& c : cp.pre) plan.steps.push_back(c);
  const auto& mid = router.steps();
  plan.steps.insert(plan.steps.end(), mid.begin() + 1, mid.end());
  for (const auto& c : cp.post) plan.steps.push_back(c);
  return plan;
}

}  // namespace detail

/// Recursive split-and-group routing of the whole grid.
inline DiscretePlan isag(const DiscreteInstance& inst) {
  detail::check_routable(inst);
  const TriGrid& g = *inst.grid;
  const auto cp = plan_corner_phases(inst);
  SwapRouter router(g, cp.inner_starts);
  router.split_and_group({whole_grid_rect(g)}, virtual_targets(router, cp.inner_goals));
  auto plan = detail::assemble(inst, cp, router);
  if (auto err = check_plan(inst, plan)) throw Error(ErrorKind::internal, "isag plan invalid: " + *err);
  return plan;
}

struct PaftOptions {
  double cell_factor = 5.0;  // cell side in multiples of d_g hops
  int max_passes = 8;
};

struct PaftReport {
  int makespan = 0;
  int d_g = 0;
  double ratio = 0.0;  // makespan / max(1, d_g)
  int cells_k = 1;     // cells across columns
  int cells_j = 1;     // cells across rows
  int cell_columns = 0;
  int cell_rows = 0;
  int passes = 0;
  bool whole_grid_fallback = false;
  int max_swap_length = 0;
  long swaps = 0;
  double wall_time = 0.0;
};

struct PaftResult {
  DiscretePlan plan;
  PaftReport report;
};

/// Partition-and-flow routing: grid cells of side about cell_factor * d_g,
/// routed in shifted 2x2-cell windows so every robot can reach a goal in its
/// own or a neighbouring cell.
inline PaftResult paft(const DiscreteInstance& inst, const PaftOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::check_routable(inst);
  const TriGrid& g = *inst.grid;
  PaftResult out;
  auto& rep = out.report;
  rep.d_g = underestimated_makespan(inst);
  if (rep.d_g == 0) {
    out.plan = stay_plan(inst.starts);
    rep.ratio = 0.0;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }
  const auto cp = plan_corner_phases(inst);
  SwapRouter router(g, cp.inner_starts);
  const SwapEngine& engine = router.engine();
  const CellRect whole = whole_grid_rect(g);
  const int span_k = whole.k1 + 1, span_j = whole.j1 + 1;
  // One column is one hop wide, one matrix row one hop tall.
  const int side = static_cast<int>(std::ceil(opt.cell_factor * rep.d_g));
  rep.cell_columns = std::clamp(side, 2, span_k);
  rep.cell_rows = std::clamp(side, 2, span_j);
  rep.cells_k = (span_k + rep.cell_columns - 1) / rep.cell_columns;
  rep.cells_j = (span_j + rep.cell_rows - 1) / rep.cell_rows;
  auto all_home = [&] {
    for (int r = 0; r < router.real_count(); ++r)
      if (router.position(r) != cp.inner_goals[r]) return false;
    return true;
  };
  if (rep.cells_k * rep.cells_j == 1) {
    router.split_and_group({whole}, virtual_targets(router, cp.inner_goals));
    rep.passes = 1;
  } else {
    static constexpr int kShift[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int p = 0; p < opt.max_passes && !all_home(); ++p) {
      ++rep.passes;
      // Windows of 2x2 cells, shifted by one cell per parity.
      std::vector<CellRect> windows;
      for (int bk = -kShift[p % 4][0]; bk < rep.cells_k; bk += 2)
        for (int bj = -kShift[p % 4][1]; bj < rep.cells_j; bj += 2) {
          CellRect w{std::max(0, bk * rep.cell_columns), std::min(whole.k1, (bk + 2) * rep.cell_columns - 1),
                     std::max(0, bj * rep.cell_rows), std::min(whole.j1, (bj + 2) * rep.cell_rows - 1)};
          if (w.k0 <= w.k1 && w.j0 <= w.j1) windows.push_back(w);
        }
      std::vector<int> target(router.disc_count(), -1);
      for (const auto& w : windows) {
        auto inside = [&](int v) {
          const Cell c = cell_of(g, v);
          return c.k >= w.k0 && c.k <= w.k1 && c.j >= w.j0 && c.j <= w.j1;
        };
        std::vector<int> discs, vertices;
        for (int k = w.k0; k <= w.k1; ++k)
          for (int j = w.j0; j <= w.j1; ++j)
            if (int v = vertex_at_cell(g, k, j); v >= 0 && !engine.frozen(v)) {
              vertices.push_back(v);
              discs.push_back(router.occupant(v));
            }
        std::unordered_map<int, char> taken;
        std::vector<int> strangers, fillers;
        for (int d : discs) {
          if (router.is_virtual(d)) {
            fillers.push_back(d);
          } else if (inside(cp.inner_goals[d])) {
            target[d] = cp.inner_goals[d];
            taken[target[d]] = 1;
          } else {
            strangers.push_back(d);
          }
        }
        // Robots bound elsewhere wait at the free window vertex closest to their goal.
        for (int d : strangers) {
          const Vec2 goal = g.vertices[cp.inner_goals[d]];
          int best = -1;
          double best_d = 0.0;
          for (int v : vertices) {
            if (taken.count(v)) continue;
            const double dd = distance(g.vertices[v], goal);
            if (best < 0 || dd < best_d - 1e-12) {
              best = v;
              best_d = dd;
            }
          }
          target[d] = best;
          taken[best] = 1;
        }
        std::vector<int> rest;
        std::vector<int> movers;
        for (int d : fillers) {
          if (!taken.count(router.position(d))) {
            target[d] = router.position(d);
            taken[target[d]] = 1;
          } else {
            movers.push_back(d);
          }
        }
        for (int v : vertices)
          if (!taken.count(v)) rest.push_back(v);
        for (std::size_t i = 0; i < movers.size(); ++i) target[movers[i]] = rest[i];
      }
      router.split_and_group(windows, target);
    }
    if (!all_home()) {
      rep.whole_grid_fallback = true;
      router.split_and_group({whole}, virtual_targets(router, cp.inner_goals));
    }
  }
  out.plan = detail::assemble(inst, cp, router);
  rep.makespan = out.plan.makespan();
  rep.ratio = static_cast<double>(rep.makespan) / std::max(1, rep.d_g);
  rep.max_swap_length = router.max_swap_length();
  rep.swaps = router.swap_count();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (auto err = check_plan(inst, out.plan)) throw Error(ErrorKind::internal, "paft plan invalid: " + *err);
  return out;
}

}  // namespace oldr
