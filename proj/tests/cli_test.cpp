// Copyright 2026 The bolzacert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bolzacert/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bolzacert/catalog.hpp"
#include "bolzacert/io.hpp"

namespace bolzacert {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("bolzacert_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    io::write_atomic(dir_ / name, text);
    return path(name);
  }
  std::string write_case(const std::string& id) const {
    return write(id + ".json", io::dump(io::problem_to_json(find_case(id).problem)));
  }
  std::string write_traj(const std::string& name, const Trajectory& x) const {
    return write(name, io::dump(io::trajectory_to_json(x)));
  }

  fs::path dir_;
};

// ---------------------------------------------------------------------------
// Formats

TEST(Io, ProblemRoundTripForEveryCatalogCase) {
  for (const BenchmarkCase& c : catalog()) {
    const std::string text = io::dump(io::problem_to_json(c.problem));
    const ProblemSpec back = io::problem_from_json(io::parse_json(text, c.id));
    EXPECT_EQ(io::dump(io::problem_to_json(back)), text) << c.id;
  }
}

TEST(Io, SetEncodingsRoundTrip) {
  Matrix A(2, 2);
  A << 1, 0, 0, 1;
  const std::vector<ConvexSet> sets = {
      ConvexSet::reals(2),
      ConvexSet::box(detail::v2(-kInf, 0), detail::v2(1, kInf)),
      ConvexSet::ball(detail::v2(1, 2), 0.5),
      ConvexSet::polyhedron(A, detail::v2(1, 2)),
      ConvexSet::singleton(detail::v2(3, 4)),
      ConvexSet::product({ConvexSet::singleton(detail::v1(0)), ConvexSet::reals(1)}),
  };
  for (const ConvexSet& S : sets) {
    const io::ordered_json j = io::set_to_json(S);
    const ConvexSet back = io::set_from_json(io::json::parse(j.dump()), "set");
    EXPECT_EQ(back.type_name(), S.type_name());
    EXPECT_EQ(io::set_to_json(back).dump(), j.dump());
  }
  const io::ordered_json box = io::set_to_json(sets[1]);
  EXPECT_EQ(box["lower"][0], "-inf");
  EXPECT_EQ(box["upper"][1], "inf");
}

TEST(Io, RejectsUnknownAndMissingFields) {
  io::json spec = io::json::parse(io::problem_to_json(case_line().problem).dump());
  spec["extra"] = 1;
  EXPECT_THROW(io::problem_from_json(spec), ValidationError);
  spec.erase("extra");
  spec["version"] = 2;
  EXPECT_THROW(io::problem_from_json(spec), ValidationError);
  spec["version"] = 1;
  spec.erase("omega1");
  EXPECT_THROW(io::problem_from_json(spec), ValidationError);

  EXPECT_THROW(io::set_from_json(io::json::parse(R"({"type":"box","lower":[0]})"), "s"), ValidationError);
  EXPECT_THROW(io::set_from_json(io::json::parse(R"({"type":"cone","dim":1})"), "s"), ValidationError);
  EXPECT_THROW(io::set_from_json(io::json::parse(R"({"type":"reals","dim":1,"x":0})"), "s"), ValidationError);
  EXPECT_THROW(io::number_from_json(io::json::parse(R"("nan")"), "v"), ValidationError);
}

TEST(Io, TrajectoryAndMultipliers) {
  const Grid g(2.0, 4);
  const Trajectory x = Trajectory::sample(g, 2, [](double t) { return detail::v2(t, 1 - t); });
  const Trajectory back = io::trajectory_from_json(io::json::parse(io::dump(io::trajectory_to_json(x))));
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(back.values(), x.values());

  const CellPath mu = CellPath::constant(g, detail::v2(1, -1));
  const io::Multipliers m =
      io::multipliers_from_json(io::json::parse(io::multipliers_to_json(mu, detail::v2(1, 2), detail::v2(3, 4)).dump()));
  EXPECT_EQ(m.mu.values(), mu.values());
  ASSERT_TRUE(m.s1 && m.s2);
  EXPECT_EQ((*m.s2)(1), 4.0);

  EXPECT_THROW(io::trajectory_from_json(io::json::parse(R"({"T":1,"n":2,"values":[[0,0],[1]]})")), ValidationError);
  EXPECT_THROW(io::trajectory_from_json(io::json::parse(R"({"T":1,"n":1,"values":[[0]]})")), ValidationError);
}

TEST(Io, ConfigAndHistory) {
  const SolverConfig cfg = io::config_from_json(io::json::parse(R"({"grid_N": 50, "penalty_rho": 2.5})"));
  EXPECT_EQ(cfg.grid_N, 50);
  EXPECT_EQ(cfg.penalty_rho, 2.5);
  EXPECT_EQ(cfg.outer_iters, SolverConfig{}.outer_iters);
  EXPECT_THROW(io::config_from_json(io::json::parse(R"({"grid": 50})")), ValidationError);
  EXPECT_THROW(io::config_from_json(io::json::parse(R"({"grid_N": -1})")), ValidationError);

  const std::string csv = io::history_csv({{1, 0.5, 0.1, 0.0, 10.0}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "outer_iter,objective,velocity_defect,endpoint_defect,rho");
}

TEST(Io, MalformedJsonNamesTheSource) {
  try {
    io::parse_json("{\"n\": 1,,}", "some/file.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("some/file.json"), std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Commands

TEST_F(CliTest, SolveLineProblem) {
  const std::string spec = write_case("P1");
  const CliRun r = run({"solve", spec, "--grid", "200", "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("converged"), std::string::npos);
  const Trajectory x = io::trajectory_from_json(io::load_json(path("P1.traj.json")));
  EXPECT_NEAR(evaluate_cost(find_case("P1").problem, x), 0.5, 1e-6);
  EXPECT_TRUE(fs::exists(path("P1.mu.json")));
  EXPECT_TRUE(fs::exists(path("P1.history.csv")));
  EXPECT_FALSE(fs::exists(path("P1.traj.json.tmp")));
}

TEST_F(CliTest, SolveMalformedSpecExitsTwoWithPath) {
  const std::string bad = write("bad.json", "{\"version\": 1, \"n\": 1,,}");
  const CliRun r = run({"solve", bad});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(bad), std::string::npos);
  EXPECT_EQ(run({"solve", path("missing.json")}).code, 2);
}

TEST_F(CliTest, SolveIsDeterministic) {
  const std::string spec = write_case("P2");
  for (const char* prefix : {"a", "b"}) {
    ASSERT_EQ(run({"solve", spec, "--grid", "200", "--seed", "7", "--out-dir", dir_.string(), "--prefix", prefix}).code,
              0);
  }
  for (const char* ext : {".traj.json", ".mu.json", ".history.csv"}) {
    EXPECT_EQ(io::read_file(path(std::string("a") + ext)), io::read_file(path(std::string("b") + ext))) << ext;
  }
}

TEST_F(CliTest, SolveNonconvergedExitsThree) {
  const std::string spec = write_case("P2");
  const CliRun r = run({"solve", spec, "--grid", "50", "--outer", "1", "--out-dir", dir_.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("not converged"), std::string::npos);

  const std::string unbounded =
      write("unbounded.json", R"({"version":1,"n":1,"T":1,"terminal_cost":"0","running_cost":"-x1",)"
                              R"("drift":["0"],"omega1":{"type":"reals","dim":1},"omega2":{"type":"reals","dim":2}})");
  EXPECT_EQ(run({"solve", unbounded, "--grid", "10", "--out-dir", dir_.string()}).code, 3);
}

TEST_F(CliTest, SolveOutputVerifiesOnEveryCatalogCase) {
  for (const BenchmarkCase& c : catalog()) {
    const std::string spec = write_case(c.id);
    ASSERT_EQ(run({"solve", spec, "--out-dir", dir_.string()}).code, 0) << c.id;
    const CliRun v = run({"verify", spec, path(c.id + ".traj.json"), "--mu", path(c.id + ".mu.json")});
    EXPECT_EQ(v.code, 0) << c.id << "\n" << v.out << v.err;
  }
}

TEST_F(CliTest, VerifyAnalyticBundle) {
  const BenchmarkCase c = find_case("P2");
  const Grid g = c.problem.grid(200);
  const std::string spec = write_case("P2");
  const std::string traj = write_traj("x.json", c.analytic->trajectory(g));
  const std::string mu =
      write("mu.json", io::dump(io::multipliers_to_json(c.analytic->multiplier(g), c.analytic->s1, c.analytic->s2)));
  const std::string report = path("report.json");
  const CliRun r = run({"verify", spec, traj, "--mu", mu, "--report", report});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict: pass"), std::string::npos);
  const io::ordered_json j = io::ordered_json::parse(io::read_file(report));
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["conditions"].size(), 7u);
  EXPECT_EQ(j.begin().key(), "verdict");
}

TEST_F(CliTest, VerifyCurvedPathFailsEulerLagrange) {
  const BenchmarkCase c = find_case("P1");
  const std::string spec = write_case("P1");
  const std::string traj =
      write_traj("x.json", Trajectory::sample(c.problem.grid(200), 1, [](double t) { return detail::v1(t * t); }));
  const CliRun r = run({"verify", spec, traj, "--json"});
  EXPECT_EQ(r.code, 1);
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "fail");
  EXPECT_GT(j["el_residual_l1"].get<double>(), 0.1);
}

TEST_F(CliTest, VerifyGridMismatchExitsTwo) {
  const BenchmarkCase c = find_case("P2");
  const std::string spec = write_case("P2");
  const std::string traj = write_traj("x.json", c.analytic->trajectory(c.problem.grid(20)));
  const std::string mu = write("mu.json", io::dump(io::cellpath_to_json(c.analytic->multiplier(c.problem.grid(40)))));
  EXPECT_EQ(run({"verify", spec, traj, "--mu", mu}).code, 2);
  EXPECT_EQ(run({"verify", spec, traj, "--s1", "0"}).code, 2);  // s2 missing
}

TEST_F(CliTest, VerifyEndpointMultiplierFlagsAndTolerances) {
  const BenchmarkCase c = find_case("P1");
  const Grid g = c.problem.grid(100);
  const std::string spec = write_case("P1");
  const std::string traj = write_traj("x.json", c.analytic->trajectory(g));
  EXPECT_EQ(run({"verify", spec, traj, "--s1", "1", "--s2=-1"}).code, 0);
  EXPECT_EQ(run({"verify", spec, traj, "--s1", "0.5", "--s2=-1"}).code, 1);
  EXPECT_EQ(run({"verify", spec, traj, "--s1", "0.5", "--s2=-1", "--ep-tol", "1"}).code, 0);
}

TEST_F(CliTest, VerifyWithProbedKappaReportsBound) {
  const BenchmarkCase c = find_case("P2");
  const Grid g = c.problem.grid(100);
  const std::string spec = write_case("P2");
  const std::string traj = write_traj("x.json", c.analytic->trajectory(g));
  const std::string mu = write("mu.json", io::dump(io::cellpath_to_json(c.analytic->multiplier(g))));
  const CliRun r = run({"verify", spec, traj, "--mu", mu, "--probe-samples", "20", "--probe-seed", "1", "--json"});
  EXPECT_EQ(r.code, 0) << r.out;
  const io::json j = io::json::parse(r.out);
  EXPECT_EQ(j["multipliers"]["kappa_source"], "probed");
  EXPECT_EQ(j["multipliers"]["bound_satisfied"], true);
  EXPECT_EQ(j["probe"]["caveat"], "lower bound only");
}

TEST_F(CliTest, Norms) {
  const std::string traj =
      write_traj("line.json", Trajectory::sample(Grid(1.0, 20), 1, [](double t) { return detail::v1(t); }));
  const CliRun r = run({"norms", traj});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ac = 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("one_one = 1.5\n"), std::string::npos);
  EXPECT_NE(r.out.find("sup = 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("= 0.75 <= ac = 1 <= (2T+1)/T * one_one = 4.5: holds"), std::string::npos);
  EXPECT_NE(r.out.find("<= (2+2T)/T * one_one = 6: holds"), std::string::npos);
}

TEST_F(CliTest, CheckDerivatives) {
  const std::string spec = write_case("P1");
  const std::string traj =
      write_traj("line.json", Trajectory::sample(Grid(1.0, 20), 1, [](double t) { return detail::v1(t); }));
  const std::string out = path("deriv.json");
  const CliRun r = run({"check-derivatives", spec, traj, "--directions", "20", "--eps", "1e-5", "--output", out});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_LE(io::load_json(out)["max_rel_error"].get<double>(), 1e-6);
}

TEST_F(CliTest, ProbeCq) {
  const std::string spec = write_case("P2");
  const std::string traj =
      write_traj("line.json", Trajectory::sample(Grid(1.0, 20), 1, [](double t) { return detail::v1(t); }));
  const CliRun r = run({"probe-cq", spec, traj, "--samples", "50", "--delta", "0.1", "--seed", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("lower bound"), std::string::npos);
  EXPECT_EQ(run({"probe-cq", spec, traj, "--samples", "0"}).code, 2);
}

TEST_F(CliTest, CatalogExport) {
  EXPECT_NE(run({"catalog"}).out.find("P3"), std::string::npos);
  const CliRun r = run({"catalog", "P4", "--spec", path("p4.json"), "--traj", path("x.json"), "--grid", "10"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(io::trajectory_from_json(io::load_json(path("x.json"))).grid().N, 10);
  EXPECT_EQ(io::problem_from_json(io::load_json(path("p4.json"))).n(), 1);
  EXPECT_EQ(run({"catalog", "P9"}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify", "only-one-arg.json"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

}  // namespace
}  // namespace bolzacert
