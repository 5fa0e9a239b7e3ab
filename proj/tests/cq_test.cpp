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

#include "bolzacert/cq.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "bolzacert/catalog.hpp"

namespace bolzacert {
namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

SolverConfig config(int N) {
  SolverConfig cfg;
  cfg.grid_N = N;
  return cfg;
}

TEST(ProbeKappa, CappedSpeedGivesFiniteLowerBound) {
  const BenchmarkCase c = case_capped_speed();
  const Grid g = c.problem.grid(60);
  const CqProbeResult r = probe_kappa(c.problem, c.analytic->trajectory(g), 100, 0.1, 1, config(60));
  ASSERT_TRUE(r.kappa_hat.has_value());
  EXPECT_TRUE(std::isfinite(*r.kappa_hat));
  EXPECT_GT(*r.kappa_hat, 0.0);
  EXPECT_EQ(r.samples + r.excluded + r.dropped, 100);
  EXPECT_EQ(r.records.size(), 100u);
  double best = 0.0;
  for (const CqSample& s : r.records) {
    EXPECT_LE(s.perturbation_norm, 0.1 * (1 + 1e-12));
    if (s.status != CqSample::Status::admitted) continue;
    EXPECT_GT(s.rhs, kCqRhsFloor);
    EXPECT_DOUBLE_EQ(s.ratio, s.lhs / s.rhs);
    best = std::max(best, s.ratio);
  }
  EXPECT_EQ(*r.kappa_hat, best);
  EXPECT_NE(r.summary().find("lower bound only"), std::string::npos);
}

TEST(ProbeKappa, DeterministicForSeed) {
  const BenchmarkCase c = case_capped_speed();
  const Grid g = c.problem.grid(40);
  const CqProbeResult a = probe_kappa(c.problem, c.analytic->trajectory(g), 20, 0.1, 9, config(40));
  const CqProbeResult b = probe_kappa(c.problem, c.analytic->trajectory(g), 20, 0.1, 9, config(40));
  EXPECT_EQ(a.kappa_hat, b.kappa_hat);
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].lhs, b.records[i].lhs);
}

TEST(ProbeKappa, LargerBallDoesNotShrinkEstimate) {
  for (const char* id : {"P2", "P4"}) {
    const BenchmarkCase c = find_case(id);
    const Grid g = c.problem.grid(40);
    const Trajectory xbar = c.analytic->trajectory(g);
    const CqProbeResult small = probe_kappa(c.problem, xbar, 30, 0.1, 5, config(40));
    const CqProbeResult large = probe_kappa(c.problem, xbar, 30, 0.2, 5, config(40));
    ASSERT_TRUE(small.kappa_hat && large.kappa_hat) << id;
    EXPECT_GE(*large.kappa_hat, *small.kappa_hat - 1e-3) << id;
  }
}

TEST(ProbeKappa, UnconstrainedProblemHasNoActiveSamples) {
  ProblemSpec P = ProblemSpec::parse(1, 1.0, "0", "v1^2/2", {"0"}, ConvexSet::reals(1), ConvexSet::reals(2));
  const Grid g = P.grid(20);
  const CqProbeResult r = probe_kappa(P, Trajectory::zero(g, 1), 25, 0.5, 2, config(20));
  EXPECT_FALSE(r.kappa_hat.has_value());
  EXPECT_EQ(r.excluded, 25);
  EXPECT_EQ(r.summary(), "no active samples");
}

TEST(ProbeKappa, PerturbationsInsideTheSetAreExcluded) {
  ProblemSpec P = ProblemSpec::parse(1, 1.0, "0", "v1^2/2", {"0"}, ConvexSet::box(scalar(-100), scalar(100)),
                                     ConvexSet::box(detail::v2(-100, -100), detail::v2(100, 100)));
  const Grid g = P.grid(20);
  const CqProbeResult r = probe_kappa(P, Trajectory::zero(g, 1), 25, 0.1, 2, config(20));
  EXPECT_FALSE(r.kappa_hat.has_value());
  EXPECT_EQ(r.samples, 0);
}

TEST(ProbeKappa, Validation) {
  const BenchmarkCase c = case_capped_speed();
  const Grid g = c.problem.grid(20);
  const Trajectory xbar = c.analytic->trajectory(g);
  EXPECT_THROW(probe_kappa(c.problem, xbar, 0, 0.1, 1, config(20)), ValidationError);
  EXPECT_THROW(probe_kappa(c.problem, xbar, 5, 0.0, 1, config(20)), ValidationError);
  const Trajectory fast = Trajectory::sample(g, 1, [](double t) { return scalar(3 * t); });
  EXPECT_THROW(probe_kappa(c.problem, fast, 5, 0.1, 1, config(20)), ValidationError);
}

}  // namespace
}  // namespace bolzacert
