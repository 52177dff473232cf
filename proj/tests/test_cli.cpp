#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "oldr/bench.hpp"
#include "oldr/generator.hpp"
#include "oldr/io.hpp"
#include "oldr/pipeline.hpp"
#include "oldr/render.hpp"

using namespace oldr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded; captures stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string(OLDR_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "oldr_cli_XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

}  // namespace

TEST(Io, InstanceRoundTripIsExact) {
  const auto inst = generate_random(build_workspace(5, 6), 9, 42);
  std::stringstream ss;
  write_instance(ss, inst);
  const auto back = read_instance(ss);
  ASSERT_EQ(back.n(), inst.n());
  EXPECT_EQ(back.workspace.n1, 5);
  for (std::size_t i = 0; i < inst.n(); ++i) {
    EXPECT_EQ(back.starts[i].x, inst.starts[i].x);
    EXPECT_EQ(back.starts[i].y, inst.starts[i].y);
    EXPECT_EQ(back.goals[i].x, inst.goals[i].x);
    EXPECT_EQ(back.goals[i].y, inst.goals[i].y);
  }
}

TEST(Io, PlansRoundTrip) {
  const auto ws = build_workspace(4, 5);
  const auto inst = generate_random(ws, 6, 3);
  const auto res = run_pipeline(inst, parse_method("paft"));
  std::stringstream d, c;
  write_discrete_plan(d, res.plan, ws);
  write_continuous_plan(c, res.continuous, ws);
  const auto pd = read_plan(d);
  EXPECT_EQ(pd.mode, PlanMode::discrete);
  EXPECT_EQ(pd.discrete.steps, res.plan.steps);
  const auto pc = read_plan(c);
  EXPECT_EQ(pc.mode, PlanMode::continuous);
  ASSERT_EQ(pc.continuous.n(), res.continuous.n());
  EXPECT_EQ(pc.continuous.makespan, res.continuous.makespan);
  for (std::size_t r = 0; r < pc.continuous.n(); ++r) {
    ASSERT_EQ(pc.continuous.trajectories[r].size(), res.continuous.trajectories[r].size());
    for (std::size_t k = 0; k < pc.continuous.trajectories[r].size(); ++k) {
      EXPECT_EQ(pc.continuous.trajectories[r][k].t, res.continuous.trajectories[r][k].t);
      EXPECT_EQ(pc.continuous.trajectories[r][k].p.x, res.continuous.trajectories[r][k].p.x);
    }
  }
  EXPECT_TRUE(validate(pc.continuous, ws, &inst.starts, &inst.goals).valid());
}

TEST(Io, ParseErrorsCarryLineNumbers) {
  auto fails = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_instance(in);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parse) << text;
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
      return;
    }
    ADD_FAILURE() << "no error for: " << text;
  };
  fails("", "line 0");
  fails("oldr-instance 2\n", "header");
  fails("oldr-instance 1\nworkspace 7\n", "line 2");
  fails("oldr-instance 1\nworkspace 7 8\nrobot 1 2 2 2 x\n", "line 3");
  fails("oldr-instance 1\n# c\nworkspace 7 8\nrobot 2 2 2 2 2\n", "line 4");
  fails("oldr-instance 1\nworkspace 1 8\n", "line 2");
}

TEST(Io, InadmissibleInstanceIsRejected) {
  std::istringstream in("oldr-instance 1\nworkspace 7 8\nrobot 1 2 2 5 5\nrobot 2 3 2 8 8\n");
  try {
    read_instance(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::inadmissible);
  }
}

TEST(Method, NamesParse) {
  EXPECT_EQ(parse_method("triilp-split-k").split_k, 2);
  EXPECT_EQ(parse_method("triilp-split-3").split_k, 3);
  EXPECT_EQ(method_name(parse_method("triilp-split-k")), "triilp-split-2");
  EXPECT_EQ(parse_method("isag").method, Method::isag);
  EXPECT_THROW(parse_method("triilp-split-1"), Error);
  EXPECT_THROW(parse_method("astar"), Error);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("solve " + dir / "missing.oldr").code, 2);
  write_file(dir / "junk.oldr", "not an instance\n");
  EXPECT_EQ(cli("solve " + dir / "junk.oldr").code, 2);
  write_file(dir / "close.oldr", "oldr-instance 1\nworkspace 7 8\nrobot 1 2 2 5 5\nrobot 2 3 2 8 8\n");
  EXPECT_EQ(cli("solve " + dir / "close.oldr").code, 3);
  ASSERT_EQ(cli("gen --n1 3 --n2 4 --count 3 --seed 2 --out " + dir / "i.oldr").code, 0);
  EXPECT_EQ(cli("solve " + dir / "i.oldr --method nope").code, 1);
  // Exhaustive backend cannot search this far.
  ASSERT_EQ(cli("gen --n1 7 --n2 8 --count 12 --seed 5 --out " + dir / "big.oldr").code, 0);
  EXPECT_EQ(cli("solve " + dir / "big.oldr --method triilp --max-T 2").code, 4);
  EXPECT_EQ(cli("solve " + dir / "i.oldr --method triilp --backend external --solver-cmd false").code, 4);
}

TEST(Cli, GenIsDeterministicAndGlobalFlagsMayFollowVerb) {
  const auto a = cli("--seed 9 gen --n1 5 --n2 6 --count 7");
  const auto b = cli("gen --n1 5 --n2 6 --count 7 --seed 9");
  const auto c = cli("gen --n1 5 --n2 6 --count 7 --seed 10");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  std::istringstream in(a.out);
  EXPECT_EQ(read_instance(in).n(), 7u);
}

TEST(Cli, GenWritesNumberedFiles) {
  TempDir dir;
  ASSERT_EQ(cli("gen --n1 4 --n2 5 --count 4 --instances 3 --out " + dir / "set").code, 0);
  for (int i = 0; i < 3; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "set_%04d.oldr", i);
    EXPECT_EQ(load_instance(dir / name).n(), 4u);
  }
}

TEST(Cli, IdentityInstanceHasZeroMakespan) {
  TempDir dir;
  auto inst = generate_random(build_workspace(4, 5), 5, 8);
  inst.goals = inst.starts;
  std::ostringstream os;
  write_instance(os, inst);
  write_file(dir / "id.oldr", os.str());
  for (const char* m : {"paft", "isag", "triilp"}) {
    const auto r = cli("solve " + dir / "id.oldr --method " + m);
    ASSERT_EQ(r.code, 0) << m;
    EXPECT_EQ(value_of(r.out, "makespan"), "0") << m;
    EXPECT_EQ(value_of(r.out, "ratio"), "1") << m;
  }
}

TEST(Cli, DenseTwentyRobotsSolveAndPlanFilesValidate) {
  TempDir dir;
  ASSERT_EQ(cli("gen --n1 7 --n2 8 --count 20 --pattern dense --seed 4 --out " + dir / "d.oldr").code, 0);
  const auto r = cli("solve " + dir / "d.oldr --method paft --out " + dir / "d.plan");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(value_of(r.out, "valid"), "1");
  const auto inst = load_instance(dir / "d.oldr");
  const auto pf = load_plan(dir / "d.plan");
  ASSERT_EQ(pf.mode, PlanMode::continuous);
  const auto rep = validate(pf.continuous, inst.workspace, &inst.starts, &inst.goals);
  EXPECT_TRUE(rep.valid()) << rep.first_problem;
  EXPECT_EQ(cli("solve " + dir / "d.oldr --method isag --plan-mode discrete --out " + dir / "d.dplan").code, 0);
  EXPECT_EQ(load_plan(dir / "d.dplan").mode, PlanMode::discrete);
}

TEST(Cli, RenderIsByteIdentical) {
  TempDir dir;
  ASSERT_EQ(cli("gen --n1 4 --n2 5 --count 5 --seed 1 --out " + dir / "r.oldr").code, 0);
  ASSERT_EQ(cli("solve " + dir / "r.oldr --out " + dir / "r.plan").code, 0);
  ASSERT_EQ(cli("solve " + dir / "r.oldr --plan-mode discrete --out " + dir / "r.dplan").code, 0);
  for (const std::string mode : {"snapshot --time 3.5", "trace"}) {
    const auto a = cli("render " + dir / "r.oldr --plan " + dir / "r.plan --mode " + mode);
    const auto b = cli("render " + dir / "r.oldr --plan " + dir / "r.plan --mode " + mode);
    const auto c = cli("render " + dir / "r.oldr --plan " + dir / "r.dplan --mode " + mode);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    EXPECT_EQ(a.out.rfind("<svg", 0), 0u);
  }
  ASSERT_EQ(cli("render " + dir / "r.oldr --plan " + dir / "r.plan --mode frames --out " + dir / "f").code, 0);
  EXPECT_TRUE(fs::exists(dir / "f_0000.svg"));
  // A plan for a different instance is a parse error.
  ASSERT_EQ(cli("gen --n1 4 --n2 5 --count 5 --seed 2 --out " + dir / "o.oldr").code, 0);
  EXPECT_EQ(cli("render " + dir / "o.oldr --plan " + dir / "r.dplan").code, 2);
}

TEST(Cli, BenchWritesTables) {
  TempDir dir;
  const auto r = cli("bench --n1 4 --n2 5 --counts 2 4 --instances 2 --methods paft isag --out " + dir / "b");
  ASSERT_EQ(r.code, 0);
  const auto tsv = read_file(dir / "b.tsv");
  EXPECT_EQ(tsv.rfind("method\tn\tmean_time\tratio\tfailures\n", 0), 0u);
  std::istringstream in(tsv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_NE(read_file(dir / "b.svg").find("<svg"), std::string::npos);
  EXPECT_FALSE(read_file(dir / "b.raw.tsv").empty());
  const auto id = cli("bench --n1 4 --n2 5 --counts 3 --instances 2 --methods paft --identity");
  ASSERT_EQ(id.code, 0);
  EXPECT_NE(id.out.find("paft\t3\t"), std::string::npos);
  EXPECT_NE(id.out.find("\t1\t0\n"), std::string::npos) << id.out;
}

TEST(Cli, ProveFailsForLargeEpsilon) {
  const auto r = cli("prove --eps 10 --threads 2");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("fail"), std::string::npos);
  EXPECT_EQ(cli("prove --eps -1").code, 1);
}

TEST(Render, SnapshotWithoutPlanShowsStarts) {
  const auto inst = generate_random(build_workspace(3, 4), 2, 1);
  const auto svg = render_svg(inst);
  EXPECT_EQ(svg, render_svg(inst));
  EXPECT_NE(svg.find(">1</text>"), std::string::npos);
  EXPECT_NE(svg.find(">2</text>"), std::string::npos);
}
