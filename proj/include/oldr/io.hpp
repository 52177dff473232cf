#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oldr/discretizer.hpp"
#include "oldr/plan.hpp"
#include "oldr/validator.hpp"

namespace oldr {

inline constexpr const char* kInstanceHeader = "oldr-instance 1";
inline constexpr const char* kPlanHeader = "oldr-plan 1";

namespace detail {

/// Reads the next non-empty, non-comment line; false at end of input.
inline bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line.erase(0, first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    return true;
  }
  return false;
}

[[noreturn]] inline void parse_fail(int lineno, const std::string& what) {
  throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": " + what);
}

/// Splits a line into a keyword and numeric fields; rejects trailing junk.
template <class T>
std::vector<T> fields(const std::string& line, const std::string& keyword, std::size_t count, int lineno) {
  std::istringstream ss(line);
  std::string kw;
  ss >> kw;
  if (kw != keyword) parse_fail(lineno, "expected '" + keyword + "', got '" + kw + "'");
  std::vector<T> out;
  T value;
  while (ss >> value) out.push_back(value);
  if (!ss.eof()) parse_fail(lineno, "malformed number in '" + line + "'");
  if (count != static_cast<std::size_t>(-1) && out.size() != count)
    parse_fail(lineno, "'" + keyword + "' expects " + std::to_string(count) + " values, got " +
                           std::to_string(out.size()));
  return out;
}

inline void expect_header(std::istream& in, const char* header, int& lineno) {
  std::string line;
  if (!next_line(in, line, lineno)) parse_fail(lineno, "empty input");
  if (line != header) parse_fail(lineno, "expected header '" + std::string(header) + "'");
}

inline std::ostream& precise(std::ostream& out) { return out << std::setprecision(17); }

}  // namespace detail

inline void write_instance(std::ostream& out, const ContinuousInstance& inst) {
  detail::precise(out) << kInstanceHeader << '\n';
  out << "workspace " << inst.workspace.n1 << ' ' << inst.workspace.n2 << '\n';
  for (std::size_t i = 0; i < inst.n(); ++i)
    out << "robot " << i + 1 << ' ' << inst.starts[i].x << ' ' << inst.starts[i].y << ' ' << inst.goals[i].x << ' '
        << inst.goals[i].y << '\n';
}

/// Parses an instance; with `check` set, separation must hold.
inline ContinuousInstance read_instance(std::istream& in, bool check = true) {
  int lineno = 0;
  detail::expect_header(in, kInstanceHeader, lineno);
  std::string line;
  if (!detail::next_line(in, line, lineno)) detail::parse_fail(lineno, "missing workspace line");
  const auto ws = detail::fields<int>(line, "workspace", 2, lineno);
  ContinuousInstance inst;
  try {
    inst.workspace = build_workspace(ws[0], ws[1]);
  } catch (const Error& e) {
    detail::parse_fail(lineno, e.what());
  }
  while (detail::next_line(in, line, lineno)) {
    const auto f = detail::fields<double>(line, "robot", 5, lineno);
    if (f[0] != static_cast<double>(inst.n() + 1))
      detail::parse_fail(lineno, "robot ids must be 1..n in order, expected " + std::to_string(inst.n() + 1));
    inst.starts.push_back({f[1], f[2]});
    inst.goals.push_back({f[3], f[4]});
  }
  if (check) {
    const auto rep = validate_separation(inst);
    if (!rep.ok()) throw Error(ErrorKind::inadmissible, "instance violates separation or bounds");
  }
  return inst;
}

enum class PlanMode { discrete, continuous };

struct PlanFile {
  PlanMode mode = PlanMode::discrete;
  int n1 = 0;
  int n2 = 0;
  DiscretePlan discrete;
  ContinuousPlan continuous;
};

inline void write_discrete_plan(std::ostream& out, const DiscretePlan& plan, const Workspace& ws) {
  out << kPlanHeader << "\nmode discrete\ngrid " << ws.n1 << ' ' << ws.n2 << '\n';
  out << "robots " << (plan.steps.empty() ? 0 : plan.steps.front().size()) << '\n';
  for (const auto& row : plan.steps) {
    out << "step";
    for (int v : row) out << ' ' << v;
    out << '\n';
  }
}

inline void write_continuous_plan(std::ostream& out, const ContinuousPlan& plan, const Workspace& ws) {
  detail::precise(out) << kPlanHeader << "\nmode continuous\ngrid " << ws.n1 << ' ' << ws.n2 << '\n';
  out << "robots " << plan.n() << '\n';
  out << "phases " << plan.snap_in << ' ' << plan.grid << ' ' << plan.snap_out << ' ' << plan.makespan << '\n';
  for (std::size_t r = 0; r < plan.n(); ++r) {
    out << "disc " << r + 1 << ' ' << plan.trajectories[r].size() << '\n';
    for (const auto& b : plan.trajectories[r]) out << "bp " << b.t << ' ' << b.p.x << ' ' << b.p.y << '\n';
  }
}

inline PlanFile read_plan(std::istream& in) {
  int lineno = 0;
  detail::expect_header(in, kPlanHeader, lineno);
  std::string line;
  PlanFile pf;
  auto need = [&](const char* what) {
    if (!detail::next_line(in, line, lineno)) detail::parse_fail(lineno, std::string("missing ") + what);
  };
  need("mode line");
  {
    std::istringstream ss(line);
    std::string kw, mode;
    ss >> kw >> mode;
    if (kw != "mode") detail::parse_fail(lineno, "expected 'mode'");
    if (mode == "discrete") pf.mode = PlanMode::discrete;
    else if (mode == "continuous") pf.mode = PlanMode::continuous;
    else detail::parse_fail(lineno, "unknown plan mode '" + mode + "'");
  }
  need("grid line");
  const auto gd = detail::fields<int>(line, "grid", 2, lineno);
  pf.n1 = gd[0];
  pf.n2 = gd[1];
  need("robots line");
  const auto n = static_cast<std::size_t>(detail::fields<long>(line, "robots", 1, lineno)[0]);
  if (pf.mode == PlanMode::discrete) {
    while (detail::next_line(in, line, lineno)) {
      auto row = detail::fields<int>(line, "step", n, lineno);
      pf.discrete.steps.push_back(std::move(row));
    }
    return pf;
  }
  need("phases line");
  const auto ph = detail::fields<double>(line, "phases", 4, lineno);
  auto& cp = pf.continuous;
  cp.snap_in = ph[0];
  cp.grid = ph[1];
  cp.snap_out = ph[2];
  cp.makespan = ph[3];
  cp.trajectories.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    need("disc line");
    const auto d = detail::fields<long>(line, "disc", 2, lineno);
    if (d[0] != static_cast<long>(r + 1)) detail::parse_fail(lineno, "disc ids must be 1..n in order");
    for (long k = 0; k < d[1]; ++k) {
      need("breakpoint");
      const auto b = detail::fields<double>(line, "bp", 3, lineno);
      cp.trajectories[r].push_back({b[0], {b[1], b[2]}});
    }
  }
  if (detail::next_line(in, line, lineno)) detail::parse_fail(lineno, "trailing content after last disc");
  return pf;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

inline ContinuousInstance load_instance(const std::string& path, bool check = true) {
  std::istringstream in(read_file(path));
  return read_instance(in, check);
}

inline PlanFile load_plan(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_plan(in);
}

}  // namespace oldr
