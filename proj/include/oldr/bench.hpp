#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oldr/generator.hpp"
#include "oldr/pipeline.hpp"
#include "oldr/render.hpp"

namespace oldr {

enum class Pattern { random, dense };

struct BenchSpec {
  int n1 = 7;
  int n2 = 8;
  std::vector<int> counts{5, 10, 15, 20};
  int instances = 10;
  Pattern pattern = Pattern::random;
  std::uint64_t seed = 1;
  std::vector<MethodSpec> methods{{Method::paft, 1}};
  Backend backend;
  bool identity = false;  // goals equal starts
};

struct BenchRecord {
  std::string method;
  int n = 0;
  int instance = 0;
  std::uint64_t seed = 0;
  double time = 0.0;
  int makespan = 0;
  int underestimate = 0;
  std::string status;  // "ok" or the failure message
};

struct BenchRow {
  std::string method;
  int n = 0;
  double mean_time = 0.0;
  double ratio = 1.0;
  int failures = 0;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<BenchRow> rows;
};

inline std::uint64_t bench_instance_seed(std::uint64_t seed, int count, int instance) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(count) * 1009ULL + static_cast<std::uint64_t>(instance);
}

inline ContinuousInstance bench_instance(const BenchSpec& spec, int count, int instance) {
  const auto ws = build_workspace(spec.n1, spec.n2);
  const auto s = bench_instance_seed(spec.seed, count, instance);
  auto inst = spec.pattern == Pattern::dense ? generate_dense(ws, count, s) : generate_random(ws, count, s);
  if (spec.identity) inst.goals = inst.starts;
  return inst;
}

/// Runs every (method, count, instance); failures are recorded and skipped.
inline BenchResult run_bench(const BenchSpec& spec) {
  BenchResult out;
  for (const auto& m : spec.methods) {
    const std::string name = method_name(m);
    for (int count : spec.counts) {
      BenchRow row{name, count, 0.0, 1.0, 0};
      std::vector<SuiteEntry> suite;
      double total = 0.0;
      for (int i = 0; i < spec.instances; ++i) {
        BenchRecord rec{name, count, i, bench_instance_seed(spec.seed, count, i), 0.0, 0, 0, "ok"};
        try {
          const auto inst = bench_instance(spec, count, i);
          const auto res = run_pipeline(inst, m, spec.backend);
          rec.time = res.plan_time;
          rec.makespan = res.makespan;
          rec.underestimate = res.underestimate;
          suite.push_back({res.makespan, res.underestimate});
          total += res.plan_time;
        } catch (const std::exception& e) {
          rec.status = e.what();
          ++row.failures;
        }
        out.records.push_back(rec);
      }
      if (!suite.empty()) {
        row.mean_time = total / static_cast<double>(suite.size());
        row.ratio = optimality_metrics(suite).aggregate;
      } else {
        row.mean_time = std::numeric_limits<double>::quiet_NaN();
        row.ratio = std::numeric_limits<double>::quiet_NaN();
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

inline std::string bench_table(const BenchResult& r) {
  std::ostringstream out;
  out << std::setprecision(9) << "method\tn\tmean_time\tratio\tfailures\n";
  for (const auto& row : r.rows)
    out << row.method << '\t' << row.n << '\t' << row.mean_time << '\t' << row.ratio << '\t' << row.failures << '\n';
  return out.str();
}

inline std::string bench_raw_table(const BenchResult& r) {
  std::ostringstream out;
  out << std::setprecision(9) << "method\tn\tinstance\tseed\ttime\tmakespan\tunderestimate\tstatus\n";
  for (const auto& x : r.records) {
    std::string status = x.status;
    std::replace(status.begin(), status.end(), '\t', ' ');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << x.method << '\t' << x.n << '\t' << x.instance << '\t' << x.seed << '\t' << x.time << '\t' << x.makespan
        << '\t' << x.underestimate << '\t' << status << '\n';
  }
  return out.str();
}

/// Two side-by-side line plots: mean runtime and ratio against robot count.
inline std::string bench_svg(const BenchResult& r) {
  using detail::num;
  std::map<std::string, std::vector<const BenchRow*>> by_method;
  std::vector<std::string> order;
  for (const auto& row : r.rows) {
    if (!by_method.count(row.method)) order.push_back(row.method);
    by_method[row.method].push_back(&row);
  }
  const double W = 360, H = 240, pad = 40;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(2 * W) + "\" height=\"" + num(H) +
                    "\" font-family=\"monospace\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int panel = 0; panel < 2; ++panel) {
    auto value = [&](const BenchRow& row) { return panel == 0 ? row.mean_time : row.ratio; };
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
    for (const auto& row : r.rows) {
      if (!std::isfinite(value(row))) continue;
      xmin = std::min(xmin, static_cast<double>(row.n));
      xmax = std::max(xmax, static_cast<double>(row.n));
      ymax = std::max(ymax, value(row));
    }
    if (xmin > xmax) xmin = 0, xmax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    const double ox = panel * W;
    auto px = [&](double x) { return ox + pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad); };
    auto py = [&](double y) { return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad); };
    out += "<g>\n<line x1=\"" + num(ox + pad) + "\" y1=\"" + num(H - pad) + "\" x2=\"" + num(ox + W - pad) +
           "\" y2=\"" + num(H - pad) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(ox + pad) + "\" y1=\"" + num(pad) + "\" x2=\"" + num(ox + pad) + "\" y2=\"" +
           num(H - pad) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(ox + W / 2) + "\" y=\"" + num(pad / 2) + "\" text-anchor=\"middle\">" +
           (panel == 0 ? std::string("mean time (s)") : std::string("optimality ratio")) + "</text>\n";
    out += "<text x=\"" + num(ox + W / 2) + "\" y=\"" + num(H - 8) + "\" text-anchor=\"middle\">robots</text>\n";
    out += "<text x=\"" + num(ox + pad - 4) + "\" y=\"" + num(pad) + "\" text-anchor=\"end\">" + num(ymax) + "</text>\n";
    for (std::size_t mi = 0; mi < order.size(); ++mi) {
      const std::string color = detail::robot_color(mi, order.size());
      std::string pts;
      for (const auto* row : by_method[order[mi]]) {
        if (!std::isfinite(value(*row))) continue;
        if (!pts.empty()) pts += ' ';
        pts += num(px(row->n)) + "," + num(py(value(*row)));
      }
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
      out += "<text x=\"" + num(ox + W - pad) + "\" y=\"" + num(pad + 14.0 * (mi + 1)) + "\" text-anchor=\"end\" fill=\"" +
             color + "\">" + order[mi] + "</text>\n";
    }
    out += "</g>\n";
  }
  return out + "</svg>\n";
}

}  // namespace oldr
