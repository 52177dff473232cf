// Command-line front end: gen, solve, prove, bench, render.
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "oldr/bench.hpp"
#include "oldr/generator.hpp"
#include "oldr/io.hpp"
#include "oldr/pipeline.hpp"
#include "oldr/render.hpp"
#include "oldr/separation_prover.hpp"

namespace {

using namespace oldr;

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kInadmissible = 3, kSolver = 4, kValidation = 5 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::io: return kParse;
    case ErrorKind::inadmissible: return kInadmissible;
    case ErrorKind::validation: return kValidation;
    case ErrorKind::bounds: return kUsage;
    case ErrorKind::infeasible:
    case ErrorKind::solver:
    case ErrorKind::internal: return kSolver;
  }
  return kSolver;
}

struct Globals {
  std::uint64_t seed = 1;
  std::string backend = "exhaustive";
  std::string solver_cmd;
  std::string out;
  int max_robots = 6;
  int max_T = 8;
};

Backend make_backend(const Globals& g) {
  Backend b;
  b.exhaustive.max_robots = g.max_robots;
  b.exhaustive.max_T = g.max_T;
  if (g.backend == "exhaustive") return b;
  b.kind = BackendKind::external;
  b.command = g.solver_cmd;
  if (b.command.empty())
    if (const char* env = std::getenv("OLDR_SOLVER_CMD")) b.command = env;
  if (b.command.empty())
    throw Error(ErrorKind::bounds, "--backend external needs --solver-cmd or OLDR_SOLVER_CMD");
  return b;
}

void emit(const Globals& g, const std::string& content) {
  if (g.out.empty() || g.out == "-") std::cout << content;
  else write_file(g.out, content);
}

std::string indexed_path(const std::string& base, int i, const std::string& ext) {
  std::ostringstream s;
  s << base << '_' << std::setw(4) << std::setfill('0') << i << ext;
  return s.str();
}

Pattern parse_pattern(const std::string& s) {
  if (s == "random") return Pattern::random;
  if (s == "dense") return Pattern::dense;
  throw Error(ErrorKind::bounds, "unknown pattern '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labeled disc routing on triangular grids"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--backend", g.backend, "ILP backend")->check(CLI::IsMember({"exhaustive", "external"}))->capture_default_str();
  app.add_option("--solver-cmd", g.solver_cmd, "External solver command with {model} and {solution}");
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_option("--max-robots", g.max_robots, "Exhaustive backend robot limit")->capture_default_str();
  app.add_option("--max-T", g.max_T, "Exhaustive backend horizon limit")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  gen->fallthrough();
  int n1 = 7, n2 = 8, count = 10, instances = 1;
  long budget = 200000;
  std::string pattern = "random";
  bool strict = true;
  gen->add_option("--n1", n1)->capture_default_str();
  gen->add_option("--n2", n2)->capture_default_str();
  gen->add_option("--count", count)->capture_default_str();
  gen->add_option("--pattern", pattern)->check(CLI::IsMember({"random", "dense"}))->capture_default_str();
  gen->add_option("--strict", strict, "Dense pitch 8/3 + 1e-6 (false: exactly 8/3)")->capture_default_str();
  gen->add_option("--budget", budget, "Rejection-sampling attempt budget")->capture_default_str();
  gen->add_option("--instances", instances, "Number of instances; >1 writes OUT_0000.oldr, ...")->capture_default_str();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->fallthrough();
  std::string instance_path, method = "paft", plan_mode = "continuous";
  solve_cmd->add_option("instance", instance_path)->required();
  solve_cmd->add_option("--method", method, "triilp | triilp-split-k | triilp-split-<k> | paft | isag")->capture_default_str();
  solve_cmd->add_option("--plan-mode", plan_mode)->check(CLI::IsMember({"continuous", "discrete"}))->capture_default_str();

  // prove
  auto* prove = app.add_subcommand("prove", "Run the separation sweep");
  prove->fallthrough();
  std::vector<double> eps{0.2, 0.1, 0.05, 0.025};
  unsigned threads = 0;
  prove->add_option("--eps", eps, "Epsilon schedule (run in descending order)")->capture_default_str();
  prove->add_option("--threads", threads, "Worker threads (0: hardware)")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Benchmark suite");
  bench->fallthrough();
  BenchSpec spec;
  std::vector<std::string> methods{"paft"};
  std::string bench_pattern = "random";
  bench->add_option("--n1", spec.n1)->capture_default_str();
  bench->add_option("--n2", spec.n2)->capture_default_str();
  bench->add_option("--counts", spec.counts)->capture_default_str();
  bench->add_option("--instances", spec.instances)->capture_default_str();
  bench->add_option("--pattern", bench_pattern)->check(CLI::IsMember({"random", "dense"}))->capture_default_str();
  bench->add_option("--methods", methods)->capture_default_str();
  bench->add_flag("--identity", spec.identity, "Goals equal starts");

  // render
  auto* render = app.add_subcommand("render", "Render an instance or plan as SVG");
  render->fallthrough();
  std::string render_instance, plan_path, render_mode = "snapshot";
  double at_time = 0.0;
  render->add_option("instance", render_instance)->required();
  render->add_option("--plan", plan_path);
  render->add_option("--mode", render_mode)->check(CLI::IsMember({"snapshot", "trace", "frames"}))->capture_default_str();
  render->add_option("--time", at_time)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      const auto ws = build_workspace(n1, n2);
      std::mt19937_64 seeds(g.seed);
      for (int i = 0; i < instances; ++i) {
        const std::uint64_t s = instances == 1 ? g.seed : seeds();
        ContinuousInstance inst;
        if (pattern == "dense") {
          DenseOptions opt;
          opt.strict = strict;
          inst = generate_dense(ws, count, s, opt);
        } else {
          inst = generate_random(ws, count, s, budget);
        }
        std::ostringstream os;
        write_instance(os, inst);
        if (instances == 1) emit(g, os.str());
        else if (g.out.empty()) std::cout << os.str();
        else write_file(indexed_path(g.out, i, ".oldr"), os.str());
      }
      return kOk;
    }

    if (solve_cmd->parsed()) {
      const auto inst = load_instance(instance_path);
      const auto m = parse_method(method);
      const auto res = run_pipeline(inst, m, make_backend(g));
      std::ostringstream plan;
      if (plan_mode == "discrete") write_discrete_plan(plan, res.plan, inst.workspace);
      else write_continuous_plan(plan, res.continuous, inst.workspace);
      if (!g.out.empty()) write_file(g.out, plan.str());
      const auto& v = res.validation;
      std::cout << std::setprecision(9);
      std::cout << "method            " << method_name(m) << '\n'
                << "robots            " << inst.n() << '\n'
                << "makespan_steps    " << res.makespan << '\n'
                << "underestimate     " << res.underestimate << '\n'
                << "ratio             " << res.ratio << '\n'
                << "continuous_time   " << res.continuous.makespan << '\n'
                << "min_clearance     " << v.min_pair_clearance << '\n'
                << "plan_time_s       " << res.plan_time << '\n';
      std::cout << "method=" << method_name(m) << "\nrobots=" << inst.n() << "\nmakespan=" << res.makespan
                << "\nunderestimate=" << res.underestimate << "\nratio=" << res.ratio
                << "\ncontinuous_makespan=" << res.continuous.makespan << "\nmin_clearance=" << v.min_pair_clearance
                << "\nmax_speed=" << v.max_speed << "\nplan_time=" << res.plan_time << "\nvalid=1\n";
      return kOk;
    }

    if (prove->parsed()) {
      std::sort(eps.begin(), eps.end(), std::greater<>());
      if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
      std::string all;
      bool any = false;
      for (double e : eps) {
        if (!(e > 0.0)) throw Error(ErrorKind::bounds, "epsilon must be positive");
        const auto c = verify(e, threads);
        all += format_certificate(c) + "\n";
        any = any || c.pass;
        std::cerr << "epsilon=" << e << " min_delta=" << c.min_delta << " verdict=" << (c.pass ? "pass" : "fail")
                  << '\n';
      }
      emit(g, all);
      return any ? kOk : kValidation;
    }

    if (bench->parsed()) {
      spec.seed = g.seed;
      spec.pattern = parse_pattern(bench_pattern);
      spec.backend = make_backend(g);
      spec.methods.clear();
      for (const auto& m : methods) spec.methods.push_back(parse_method(m));
      const auto res = run_bench(spec);
      if (g.out.empty()) {
        std::cout << bench_table(res);
      } else {
        write_file(g.out + ".tsv", bench_table(res));
        write_file(g.out + ".raw.tsv", bench_raw_table(res));
        write_file(g.out + ".svg", bench_svg(res));
      }
      return kOk;
    }

    if (render->parsed()) {
      const auto inst = load_instance(render_instance);
      RenderOptions opt;
      opt.time = at_time;
      opt.mode = render_mode == "trace" ? RenderMode::trace : RenderMode::snapshot;
      if (plan_path.empty()) {
        emit(g, render_svg(inst, nullptr, opt));
        return kOk;
      }
      const auto pf = load_plan(plan_path);
      if (pf.n1 != inst.workspace.n1 || pf.n2 != inst.workspace.n2)
        throw Error(ErrorKind::parse, "plan grid does not match the instance workspace");
      ContinuousPlan cp;
      if (pf.mode == PlanMode::continuous) {
        cp = pf.continuous;
      } else {
        auto grid = std::make_shared<const TriGrid>(build_grid(inst.workspace));
        const auto d = discretize(inst, grid);
        try {
          cp = synthesize(inst, d, pf.discrete);
        } catch (const Error& e) {
          throw Error(ErrorKind::parse, std::string("plan does not match instance: ") + e.what());
        }
      }
      if (cp.n() != inst.n()) throw Error(ErrorKind::parse, "plan and instance robot counts differ");
      if (render_mode == "frames") {
        const auto frames = render_frames(inst, cp, opt);
        if (g.out.empty()) throw Error(ErrorKind::bounds, "--mode frames needs --out as a file prefix");
        for (std::size_t i = 0; i < frames.size(); ++i) write_file(indexed_path(g.out, static_cast<int>(i), ".svg"), frames[i]);
        return kOk;
      }
      emit(g, render_svg(inst, &cp, opt));
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}
