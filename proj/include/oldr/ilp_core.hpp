#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "oldr/discretizer.hpp"
#include "oldr/plan.hpp"

namespace oldr {

enum class VarKind { move, stay, virtual_goal };

struct IlpVariable {
  int robot = 0;
  int from = 0;
  int to = 0;
  int step = 0;
  VarKind kind = VarKind::move;
};

enum class Relation { le, eq };

enum class RowFamily { flow, coupling, vertex, edge, triangle };

struct LinearRow {
  std::vector<std::pair<int, int>> terms;  // (variable index, coefficient)
  Relation rel = Relation::le;
  int rhs = 0;
  RowFamily family = RowFamily::flow;
};

enum class Pruning {
  /// Drop variables that cannot lie on any start-to-goal path within T (BFS test).
  reachability,
  /// Only drop first-step variables that do not leave the robot's start.
  start_only,
};

struct IlpModel {
  int T = 0;
  int robots = 0;
  std::vector<IlpVariable> variables;
  std::vector<LinearRow> rows;
  std::vector<int> virtual_var;  // per robot
  std::int64_t pruned_count = 0;

  std::string name(int v) const {
    const auto& x = variables[v];
    return "x_" + std::to_string(x.robot) + "_" + std::to_string(x.from) + "_" + std::to_string(x.to) +
           "_" + std::to_string(x.step);
  }

  int find(int r, int i, int j, int t) const {
    const auto it = index.find(key(r, i, j, t));
    return it == index.end() ? -1 : it->second;
  }

  static std::uint64_t key(int r, int i, int j, int t) {
    return (static_cast<std::uint64_t>(r) << 48) ^ (static_cast<std::uint64_t>(i) << 32) ^
           (static_cast<std::uint64_t>(j) << 16) ^ static_cast<std::uint64_t>(t);
  }

  std::unordered_map<std::uint64_t, int> index;
};

struct Solution {
  std::vector<std::uint8_t> values;
  int objective = 0;
};

namespace detail {

inline void check_ids_fit(const DiscreteInstance& inst, int T) {
  if (inst.grid->size() >= (1u << 16) || inst.n() >= (1u << 15) || T >= (1 << 16))
    throw Error(ErrorKind::bounds, "model too large for variable indexing");
}

}  // namespace detail

/// Time-expanded network model. Step t of variable (r,i,j,t) moves robot r from
/// i (time t) to j (time t+1); j == i is a stay.
inline IlpModel build_model(const DiscreteInstance& inst, int T, Pruning pruning = Pruning::reachability) {
  if (T < 1) throw Error(ErrorKind::bounds, "horizon T must be at least 1");
  check_discrete_instance(inst);
  detail::check_ids_fit(inst, T);
  const TriGrid& g = *inst.grid;
  const int nv = static_cast<int>(g.size());
  const int n = static_cast<int>(inst.n());
  IlpModel m;
  m.T = T;
  m.robots = n;

  auto add_var = [&](int r, int i, int j, int t, VarKind k) {
    const int id = static_cast<int>(m.variables.size());
    m.variables.push_back({r, i, j, t, k});
    m.index.emplace(IlpModel::key(r, i, j, t), id);
    return id;
  };

  // Per (vertex, step): robots' variables leaving the vertex (for capacity rows).
  std::vector<std::vector<int>> leaving(static_cast<std::size_t>(nv) * T);
  for (int r = 0; r < n; ++r) {
    const int s = inst.starts[r], goal = inst.goals[r];
    std::vector<int> ds, dg;
    if (pruning == Pruning::reachability) {
      ds = bfs_distances(g, s);
      dg = bfs_distances(g, goal);
    }
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < nv; ++i) {
        if (t == 0 && i != s) {
          m.pruned_count += static_cast<std::int64_t>(g.adjacency[i].size()) + 1;
          continue;
        }
        if (pruning == Pruning::reachability && (ds[i] < 0 || ds[i] > t)) {
          m.pruned_count += static_cast<std::int64_t>(g.adjacency[i].size()) + 1;
          continue;
        }
        auto consider = [&](int j) {
          if (pruning == Pruning::reachability && (dg[j] < 0 || dg[j] > T - t - 1)) {
            ++m.pruned_count;
            return;
          }
          leaving[static_cast<std::size_t>(i) * T + t].push_back(
              add_var(r, i, j, t, i == j ? VarKind::stay : VarKind::move));
        };
        // N(i) includes i; keep ascending id order for deterministic naming.
        bool stay_done = false;
        for (int j : g.adjacency[i]) {
          if (!stay_done && i < j) {
            consider(i);
            stay_done = true;
          }
          consider(j);
        }
        if (!stay_done) consider(i);
      }
    }
    m.virtual_var.push_back(add_var(r, goal, s, T, VarKind::virtual_goal));
  }

  auto push_row = [&](LinearRow row) {
    if (!row.terms.empty()) m.rows.push_back(std::move(row));
  };

  // Flow conservation between consecutive steps.
  for (int r = 0; r < n; ++r) {
    for (int t = 0; t + 1 < T; ++t) {
      for (int j = 0; j < nv; ++j) {
        LinearRow row{{}, Relation::eq, 0, RowFamily::flow};
        auto in = [&](int i) {
          const int v = m.find(r, i, j, t);
          if (v >= 0) row.terms.emplace_back(v, 1);
        };
        auto out = [&](int k) {
          const int v = m.find(r, j, k, t + 1);
          if (v >= 0) row.terms.emplace_back(v, -1);
        };
        in(j);
        for (int i : g.adjacency[j]) in(i);
        out(j);
        for (int k : g.adjacency[j]) out(k);
        push_row(std::move(row));
      }
    }
  }
  // Start departures and goal arrivals both equal the virtual variable.
  for (int r = 0; r < n; ++r) {
    const int s = inst.starts[r], goal = inst.goals[r];
    LinearRow dep{{}, Relation::eq, 0, RowFamily::coupling};
    LinearRow arr{{}, Relation::eq, 0, RowFamily::coupling};
    auto dep_to = [&](int i) {
      const int v = m.find(r, s, i, 0);
      if (v >= 0) dep.terms.emplace_back(v, 1);
    };
    auto arr_from = [&](int i) {
      const int v = m.find(r, i, goal, T - 1);
      if (v >= 0) arr.terms.emplace_back(v, 1);
    };
    dep_to(s);
    for (int i : g.adjacency[s]) dep_to(i);
    arr_from(goal);
    for (int i : g.adjacency[goal]) arr_from(i);
    dep.terms.emplace_back(m.virtual_var[r], -1);
    arr.terms.emplace_back(m.virtual_var[r], -1);
    m.rows.push_back(std::move(dep));
    m.rows.push_back(std::move(arr));
  }
  // Vertex capacity.
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < nv; ++i) {
      LinearRow row{{}, Relation::le, 1, RowFamily::vertex};
      for (int v : leaving[static_cast<std::size_t>(i) * T + t]) row.terms.emplace_back(v, 1);
      if (row.terms.size() > 1) push_row(std::move(row));
    }
  auto directed_moves = [&](int t, std::initializer_list<std::pair<int, int>> arcs) {
    LinearRow row{{}, Relation::le, 1, RowFamily::edge};
    for (int r = 0; r < n; ++r)
      for (auto [a, b] : arcs) {
        const int v = m.find(r, a, b, t);
        if (v >= 0) row.terms.emplace_back(v, 1);
      }
    return row;
  };
  // Head-on exclusion per undirected edge.
  for (int t = 0; t < T; ++t)
    for (auto [a, b] : g.edges) {
      auto row = directed_moves(t, {{a, b}, {b, a}});
      if (row.terms.size() > 1) push_row(std::move(row));
    }
  // At most one move inside each triangle.
  for (int t = 0; t < T; ++t)
    for (const auto& tri : g.triangles) {
      const int a = tri[0], b = tri[1], c = tri[2];
      auto row = directed_moves(t, {{a, b}, {b, a}, {b, c}, {c, b}, {a, c}, {c, a}});
      row.family = RowFamily::triangle;
      if (row.terms.size() > 1) push_row(std::move(row));
    }
  return m;
}

/// True when every row holds under `values`.
inline bool satisfies(const IlpModel& m, const std::vector<std::uint8_t>& values) {
  for (const auto& row : m.rows) {
    int lhs = 0;
    for (auto [v, c] : row.terms) lhs += c * values[v];
    if (row.rel == Relation::eq ? lhs != row.rhs : lhs > row.rhs) return false;
  }
  return true;
}

inline int objective_of(const IlpModel& m, const std::vector<std::uint8_t>& values) {
  int s = 0;
  for (int v : m.virtual_var) s += values[v];
  return s;
}

/// CPLEX-style LP text with deterministic ordering.
inline std::string export_lp(const IlpModel& m) {
  std::ostringstream os;
  auto write_terms = [&](const std::vector<std::pair<int, int>>& terms) {
    int on_line = 0;
    bool first = true;
    for (auto [v, c] : terms) {
      if (on_line == 8) {
        os << "\n   ";
        on_line = 0;
      }
      if (c < 0) os << (first ? "-" : " - ");
      else if (!first) os << " + ";
      if (std::abs(c) != 1) os << std::abs(c) << ' ';
      os << m.name(v);
      first = false;
      ++on_line;
    }
  };
  os << "\\ oldr time-expanded model, T = " << m.T << ", robots = " << m.robots << "\n";
  os << "maximize\n obj: ";
  if (m.virtual_var.empty()) {
    os << "0";
  } else {
    std::vector<std::pair<int, int>> obj;
    for (int v : m.virtual_var) obj.emplace_back(v, 1);
    write_terms(obj);
  }
  os << "\nsubject to\n";
  static constexpr const char* prefix[] = {"flow", "couple", "vertex", "edge", "tri"};
  for (std::size_t k = 0; k < m.rows.size(); ++k) {
    const auto& row = m.rows[k];
    os << ' ' << prefix[static_cast<int>(row.family)] << k << ": ";
    write_terms(row.terms);
    os << (row.rel == Relation::eq ? " = " : " <= ") << row.rhs << '\n';
  }
  if (!m.variables.empty()) {
    os << "binary\n";
    for (std::size_t v = 0; v < m.variables.size(); ++v) os << ' ' << m.name(static_cast<int>(v)) << '\n';
  }
  os << "end\n";
  return os.str();
}

/// Reads "name value" lines; values >= 0.5 count as 1. Unknown names are errors.
inline Solution parse_solution(const IlpModel& m, std::istream& in) {
  std::unordered_map<std::string, int> by_name;
  by_name.reserve(m.variables.size() * 2);
  for (std::size_t v = 0; v < m.variables.size(); ++v) by_name.emplace(m.name(static_cast<int>(v)), static_cast<int>(v));
  Solution s;
  s.values.assign(m.variables.size(), 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string name;
    double value = 0.0;
    if (!(ls >> name) || name[0] == '#') continue;
    if (!(ls >> value)) throw Error(ErrorKind::solver, "solution line " + std::to_string(lineno) + " has no value");
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorKind::solver, "solution names unknown variable " + name);
    s.values[it->second] = value >= 0.5 ? 1 : 0;
  }
  s.objective = objective_of(m, s.values);
  return s;
}

struct ExhaustiveOptions {
  int max_robots = 6;
  int max_T = 8;
};

namespace detail {

/// Depth-first search over per-robot routes with row usage counters. Each robot
/// is routed along a full path or left out; inequality rows are tracked
/// incrementally and equality rows hold by construction of a path.
class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const IlpModel& m, const DiscreteInstance& inst) : m_(m), inst_(inst) {
    rows_of_.resize(m.variables.size());
    for (std::size_t k = 0; k < m.rows.size(); ++k)
      if (m.rows[k].rel == Relation::le)
        for (auto [v, c] : m.rows[k].terms) rows_of_[v].push_back(static_cast<int>(k));
    usage_.assign(m.rows.size(), 0);
    values_.assign(m.variables.size(), 0);
    // Outgoing variables per (robot, vertex, step).
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
      const auto& x = m.variables[v];
      if (x.kind == VarKind::virtual_goal) continue;
      out_[IlpModel::key(x.robot, x.from, 0, x.step)].push_back(static_cast<int>(v));
    }
    // Try staying first.
    for (auto& [k, list] : out_)
      std::stable_partition(list.begin(), list.end(),
                            [&](int v) { return m.variables[v].kind == VarKind::stay; });
  }

  Solution run() {
    best_.values.assign(m_.variables.size(), 0);
    best_.objective = -1;
    robot(0, 0);
    return best_;
  }

 private:
  bool fits(int v) const {
    for (int k : rows_of_[v])
      if (usage_[k] + 1 > m_.rows[k].rhs) return false;
    return true;
  }
  void take(int v, int d) {
    values_[v] = static_cast<std::uint8_t>(values_[v] + d);
    for (int k : rows_of_[v]) usage_[k] += d;
  }

  void robot(int r, int score) {
    if (best_.objective == m_.robots) return;
    if (score + (m_.robots - r) <= best_.objective) return;
    if (r == m_.robots) {
      best_.values = values_;
      best_.objective = score;
      return;
    }
    const int vv = m_.virtual_var[r];
    take(vv, 1);
    walk(r, inst_.starts[r], 0, score);
    take(vv, -1);
    robot(r + 1, score);
  }

  void walk(int r, int at, int t, int score) {
    if (best_.objective == m_.robots) return;
    if (t == m_.T) {
      if (at == inst_.goals[r]) robot(r + 1, score + 1);
      return;
    }
    const auto it = out_.find(IlpModel::key(r, at, 0, t));
    if (it == out_.end()) return;
    for (int v : it->second) {
      if (!fits(v)) continue;
      take(v, 1);
      walk(r, m_.variables[v].to, t + 1, score);
      take(v, -1);
      if (best_.objective == m_.robots) return;
    }
  }

  const IlpModel& m_;
  const DiscreteInstance& inst_;
  std::vector<std::vector<int>> rows_of_;
  std::vector<int> usage_;
  std::vector<std::uint8_t> values_;
  std::unordered_map<std::uint64_t, std::vector<int>> out_;
  Solution best_;
};

}  // namespace detail

inline Solution solve_exhaustive(const IlpModel& m, const DiscreteInstance& inst, ExhaustiveOptions opt = {}) {
  if (m.robots > opt.max_robots || m.T > opt.max_T)
    throw Error(ErrorKind::solver, "exhaustive backend limited to " + std::to_string(opt.max_robots) +
                                       " robots and T <= " + std::to_string(opt.max_T) + " (got " +
                                       std::to_string(m.robots) + " robots, T = " + std::to_string(m.T) + ")");
  detail::ExhaustiveSearch search(m, inst);
  Solution s = search.run();
  if (!satisfies(m, s.values)) throw Error(ErrorKind::internal, "exhaustive search produced an infeasible point");
  return s;
}

/// Writes the model, runs `command` with {model} and {solution} substituted and
/// reads the solution file back.
inline Solution solve_external(const IlpModel& m, const std::string& command) {
  if (command.empty()) throw Error(ErrorKind::solver, "no external solver command configured");
  namespace fs = std::filesystem;
  static std::uint64_t counter = 0;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  const fs::path dir = fs::temp_directory_path() /
                       ("oldr-" + std::to_string(stamp) + "-" + std::to_string(++counter) + "-" +
                        std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const fs::path model = dir / "model.lp";
  const fs::path sol = dir / "model.sol";
  {
    std::ofstream out(model);
    out << export_lp(m);
    if (!out) throw Error(ErrorKind::io, "cannot write " + model.string());
  }
  std::string cmd = command;
  auto substitute = [&](const std::string& key, const std::string& value) {
    for (std::size_t p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size()))
      cmd.replace(p, key.size(), value);
  };
  substitute("{model}", model.string());
  substitute("{solution}", sol.string());
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    fs::remove_all(dir);
    throw Error(ErrorKind::solver, "external solver exited with status " + std::to_string(rc) + ": " + cmd);
  }
  std::ifstream in(sol);
  if (!in) {
    fs::remove_all(dir);
    throw Error(ErrorKind::solver, "external solver wrote no solution file");
  }
  Solution s;
  try {
    s = parse_solution(m, in);
  } catch (...) {
    fs::remove_all(dir);
    throw;
  }
  fs::remove_all(dir);
  if (!satisfies(m, s.values)) throw Error(ErrorKind::solver, "external solution violates the model");
  return s;
}

enum class BackendKind { exhaustive, external };

struct Backend {
  BackendKind kind = BackendKind::exhaustive;
  std::string command;
  ExhaustiveOptions exhaustive;
};

inline Solution solve(const IlpModel& m, const DiscreteInstance& inst, const Backend& b) {
  return b.kind == BackendKind::exhaustive ? solve_exhaustive(m, inst, b.exhaustive)
                                           : solve_external(m, b.command);
}

/// Extracts the per-step configurations of a complete solution.
inline DiscretePlan decode(const IlpModel& m, const DiscreteInstance& inst, const Solution& s) {
  if (s.objective != m.robots) throw Error(ErrorKind::solver, "cannot decode an incomplete solution");
  DiscretePlan plan;
  plan.steps.assign(m.T + 1, std::vector<int>(m.robots, -1));
  for (std::size_t v = 0; v < m.variables.size(); ++v) {
    if (!s.values[v]) continue;
    const auto& x = m.variables[v];
    if (x.kind == VarKind::virtual_goal) continue;
    plan.steps[x.step][x.robot] = x.from;
    plan.steps[x.step + 1][x.robot] = x.to;
  }
  for (int r = 0; r < m.robots; ++r) plan.steps[0][r] = inst.starts[r];
  for (const auto& row : plan.steps)
    for (int v : row)
      if (v < 0) throw Error(ErrorKind::solver, "solution leaves a robot without a position");
  return plan;
}

}  // namespace oldr
