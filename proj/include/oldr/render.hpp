#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oldr/discretizer.hpp"
#include "oldr/validator.hpp"

namespace oldr {

enum class RenderMode { snapshot, trace };

struct RenderOptions {
  RenderMode mode = RenderMode::snapshot;
  double time = 0.0;   // snapshot time
  double scale = 20.0;  // pixels per workspace unit
  bool grid = true;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

/// Evenly spread hues, fixed per robot index.
inline std::string robot_color(std::size_t i, std::size_t n) {
  const int hue = n == 0 ? 0 : static_cast<int>((360 * i) / std::max<std::size_t>(n, 1));
  return "hsl(" + std::to_string(hue) + ",70%,45%)";
}

}  // namespace detail

/// Deterministic SVG of the workspace, grid, goals and discs. With a plan,
/// snapshot mode places discs at `time`; trace mode draws every trajectory.
inline std::string render_svg(const ContinuousInstance& inst, const ContinuousPlan* plan = nullptr,
                              const RenderOptions& opt = {}) {
  using detail::num;
  const Workspace& ws = inst.workspace;
  const double s = opt.scale;
  // y grows upward in the workspace, downward in SVG.
  auto X = [&](double x) { return num(x * s); };
  auto Y = [&](double y) { return num((ws.h - y) * s); };
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(ws.w * s) + "\" height=\"" + num(ws.h * s) +
         "\" viewBox=\"0 0 " + num(ws.w * s) + " " + num(ws.h * s) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(ws.w * s) + "\" height=\"" + num(ws.h * s) +
         "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
  if (opt.grid) {
    const TriGrid g = build_grid(ws);
    out += "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (auto [a, b] : g.edges)
      out += "<line x1=\"" + X(g.vertices[a].x) + "\" y1=\"" + Y(g.vertices[a].y) + "\" x2=\"" + X(g.vertices[b].x) +
             "\" y2=\"" + Y(g.vertices[b].y) + "\"/>\n";
    out += "</g>\n";
  }
  const std::size_t n = inst.n();
  out += "<g fill=\"none\" stroke-dasharray=\"4 3\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < n; ++i)
    out += "<circle cx=\"" + X(inst.goals[i].x) + "\" cy=\"" + Y(inst.goals[i].y) + "\" r=\"" + num(s) +
           "\" stroke=\"" + detail::robot_color(i, n) + "\"/>\n";
  out += "</g>\n";
  if (plan && opt.mode == RenderMode::trace) {
    out += "<g fill=\"none\" stroke-width=\"1.5\">\n";
    for (std::size_t i = 0; i < plan->n(); ++i) {
      out += "<polyline stroke=\"" + detail::robot_color(i, n) + "\" points=\"";
      bool first = true;
      for (const auto& b : plan->trajectories[i]) {
        if (!first) out += ' ';
        out += X(b.p.x) + "," + Y(b.p.y);
        first = false;
      }
      out += "\"/>\n";
    }
    out += "</g>\n";
  }
  out += "<g fill-opacity=\"0.6\" stroke=\"black\" stroke-width=\"1\" font-family=\"monospace\" font-size=\"" +
         num(s * 0.8) + "\" text-anchor=\"middle\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 p = inst.starts[i];
    if (plan && opt.mode == RenderMode::snapshot && i < plan->n() && !plan->trajectories[i].empty())
      p = position_at(plan->trajectories[i], opt.time);
    out += "<circle cx=\"" + X(p.x) + "\" cy=\"" + Y(p.y) + "\" r=\"" + num(s) + "\" fill=\"" +
           detail::robot_color(i, n) + "\"/>\n";
    out += "<text x=\"" + X(p.x) + "\" y=\"" + num((ws.h - p.y) * s + 0.3 * s) + "\" stroke=\"none\" fill=\"black\">" +
           std::to_string(i + 1) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

/// One snapshot per grid step boundary (plus start and end).
inline std::vector<std::string> render_frames(const ContinuousInstance& inst, const ContinuousPlan& plan,
                                              RenderOptions opt = {}) {
  std::vector<double> times{0.0};
  const double e = grid_step_duration();
  if (plan.snap_in > 0.0) times.push_back(plan.snap_in);
  const int steps = static_cast<int>(std::lround(plan.grid / e));
  for (int k = 1; k <= steps; ++k) times.push_back(plan.snap_in + k * e);
  if (plan.snap_out > 0.0) times.push_back(plan.makespan);
  std::vector<std::string> out;
  opt.mode = RenderMode::snapshot;
  for (double t : times) {
    opt.time = t;
    out.push_back(render_svg(inst, &plan, opt));
  }
  return out;
}

}  // namespace oldr
